#pragma once

// Operator splitting (ADMM) for
//
//   minimize ||B u|| + g(A u - y),
//
// where ||.|| is a structure norm with a cheap prox and g is either the
// indicator of { r : phi(r) <= epsilon } or lambda * phi(r). The splitting
// introduces w = B u and r = A u - y; the u-update solves a linear system
// with the matrix B^T B + A^T A, factored once.

#include "structrec/lp.hpp"
#include "structrec/types.hpp"

#include <functional>

namespace structrec {

enum class PenaltyKind { BallIndicator, Scaled };

struct SplitProblem {
  Matrix A;
  Matrix B;
  bool b_identity = true;
  Vector y;
  /// Norm on E and its prox: prox(v, tau) = argmin tau ||w|| + 1/2 ||w - v||^2.
  std::function<double(const Vector&)> norm;
  std::function<Vector(const Vector&, double)> prox;
  NormTag phi = NormTag::L2;
  PenaltyKind penalty = PenaltyKind::BallIndicator;
  double epsilon = 0.0;  // ball radius (BallIndicator)
  double lambda = 1.0;   // weight (Scaled)

  double rho = 1.0;
  double relaxation = 1.6;
  double tol = 1e-8;
  int max_iterations = 50000;
  int adapt_every = 50;
};

struct SplitSolution {
  Vector u;
  Vector w;       // split copy of B u
  Vector r;       // split copy of A u - y
  Vector dual_w;  // unscaled multiplier of B u = w
  Vector dual_r;  // unscaled multiplier of A u - y = r
  double rho = 1.0;
  SolveReport report;
};

SplitSolution solve_split(const SplitProblem& problem);

}  // namespace structrec
