#pragma once

// Norm-minimization recovery of w = Bx from y = Ax + xi.
//
//   regular:    minimize ||B u||  s.t.  phi(A u - y) <= epsilon
//   penalized:  minimize ||B u|| + lambda phi(A u - y)
//
// Polyhedral instances (plain or group structures whose blocks are l1, linf
// or scalar, with an l1/linf noise norm or epsilon = 0) are solved exactly by
// the simplex backend; everything else goes through the splitting solver.
// Every result reports how far it is from optimal (delta) and from feasible
// (delta_phi), measured from a dual certificate and the realized residual.

#include "structrec/lp.hpp"
#include "structrec/structures.hpp"
#include "structrec/types.hpp"

namespace structrec {

struct RecoveryProblem {
  Matrix A;  // m x dim(X)
  Vector y;
  NormTag phi = NormTag::L2;
  double epsilon = 0.0;
};

enum class Backend { Auto, Lp, Split };
std::string to_string(Backend backend);

struct RecoveryOptions {
  Backend backend = Backend::Auto;
  double tol = 1e-8;
  int max_iterations = 50000;
};

struct RecoveryResult {
  Vector x_hat;
  Vector w_hat;            // B x_hat, recomputed
  double objective = 0.0;  // value of the recovery objective at x_hat
  double delta = 0.0;      // objective - (lower bound on the optimal value)
  double delta_phi = 0.0;  // max(0, phi(A x_hat - y) - epsilon), regular mode
  Backend backend = Backend::Lp;
  SolveReport report;
};

/// True when the program has an exact linear-programming reformulation.
bool lp_expressible(const SparsityStructure& structure, NormTag phi, double epsilon,
                    bool penalized, Eigen::Index rows);

RecoveryResult recover_regular(const RecoveryProblem& problem, const SparsityStructure& structure,
                               const RecoveryOptions& options = {});

/// Ignores problem.epsilon.
RecoveryResult recover_penalized(const RecoveryProblem& problem,
                                 const SparsityStructure& structure, double lambda,
                                 const RecoveryOptions& options = {});

/// min_u phi(A u - y): the smallest epsilon for which the regular program is
/// feasible.
double min_residual(const Matrix& a, const Vector& y, NormTag phi);

struct ErrorBudget {
  double epsilon = 0.0;
  double delta_x = 0.0;
  double delta_phi = 0.0;
  double delta = 0.0;
  double lambda = 0.0;  // penalized mode
  double phi_xi = 0.0;  // realized phi(xi), penalized mode
};

enum class BoundMode { Regular, Penalized };
std::string to_string(BoundMode mode);

/// Upper bound on ||B x_hat - B x|| under a condition with constants
/// (gamma, beta):
///   regular:   (beta (2 epsilon + delta_phi) + delta + 2 delta_x) / (1 - gamma)
///   penalized: (2 delta_x + delta + 2 lambda phi(xi)) / (1 - gamma), lambda >= beta
/// Throws GammaTooLarge when gamma >= 1 and LambdaBelowBeta when lambda < beta.
double error_bound(double gamma, double beta, const ErrorBudget& budget, BoundMode mode);

}  // namespace structrec
