#include "structrec/recovery.hpp"

#include "structrec/linalg.hpp"
#include "structrec/norms.hpp"
#include "structrec/split.hpp"

#include "lp_forms.hpp"

#include <algorithm>
#include <cmath>

namespace structrec {

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::Auto: return "auto";
    case Backend::Lp: return "lp";
    case Backend::Split: return "split";
  }
  return "?";
}

std::string to_string(BoundMode mode) {
  return mode == BoundMode::Regular ? "regular" : "penalized";
}

namespace {

bool polyhedral_norm(const SparsityStructure& st) {
  if (st.kind() == StructureKind::Plain) return true;
  if (st.kind() == StructureKind::LowRank) return false;
  for (int l = 0; l < st.num_blocks(); ++l)
    if (st.block_size(l) > 1 && st.block_norm(l) == NormTag::L2) return false;
  return true;
}

bool polyhedral_phi(NormTag phi, Eigen::Index rows) {
  return phi == NormTag::L1 || phi == NormTag::LInf || rows <= 1;
}

void check_problem(const RecoveryProblem& pb, const SparsityStructure& st) {
  if (pb.A.cols() != st.dim_x()) throw DimensionMismatch("recovery: A has wrong number of columns");
  if (pb.y.size() != pb.A.rows()) throw DimensionMismatch("recovery: y does not match A");
  if (!is_vector_norm(pb.phi)) throw Unsupported("recovery: phi must be l1, l2 or linf");
  if (!(pb.epsilon >= 0)) throw Error("recovery: epsilon must be nonnegative");
}

double objective_value(const SparsityStructure& st, const RepresentationMap& rep,
                       const RecoveryProblem& pb, const Vector& x, bool penalized, double lambda) {
  double v = structure_norm(st, rep.apply(x));
  if (penalized) v += lambda * vector_norm(pb.A * x - pb.y, pb.phi);
  return v;
}

RecoveryResult finish(const SparsityStructure& st, const RepresentationMap& rep,
                      const RecoveryProblem& pb, Vector x, bool penalized, double lambda,
                      double lower_bound, const SolveReport& report, Backend backend) {
  RecoveryResult res;
  res.x_hat = std::move(x);
  res.w_hat = rep.apply(res.x_hat);
  res.objective = objective_value(st, rep, pb, res.x_hat, penalized, lambda);
  res.delta = std::isfinite(lower_bound) ? std::max(0.0, res.objective - lower_bound) : kInf;
  res.delta_phi = penalized ? 0.0
                            : std::max(0.0, vector_norm(pb.A * res.x_hat - pb.y, pb.phi) - pb.epsilon);
  res.report = report;
  res.backend = backend;
  return res;
}

RecoveryResult solve_by_lp(const RecoveryProblem& pb, const SparsityStructure& st,
                           const RepresentationMap& rep, bool penalized, double lambda) {
  LpBuilder b;
  const int d = st.dim_x();
  const int u0 = b.add_variables(d, -kInf, kInf, 0.0);
  detail::add_norm_epigraph(b, st, u0, 1.0);
  if (penalized) {
    detail::add_residual_epigraph(b, pb.A, pb.y, u0, pb.phi, lambda);
  } else if (pb.epsilon == 0.0) {
    detail::add_equality(b, pb.A, pb.y, u0);
  } else {
    detail::add_sum_bound(b, detail::add_residual_epigraph(b, pb.A, pb.y, u0, pb.phi, 0.0),
                          pb.epsilon);
  }
  const LpSolution sol = solve_lp(b.build());
  if (sol.report.status != SolveStatus::Optimal) {
    RecoveryResult res;
    res.x_hat = Vector::Zero(d);
    res.w_hat = rep.apply(res.x_hat);
    res.report = sol.report;
    res.backend = Backend::Lp;
    res.delta = kInf;
    res.delta_phi = kInf;
    return res;
  }
  return finish(st, rep, pb, sol.x.head(d), penalized, lambda, sol.dual_objective, sol.report,
                Backend::Lp);
}

// Dual lower bound from the splitting multipliers, repaired to exact dual
// feasibility: B^T f + A^T v = 0, ||f||_* <= 1, and phi_*(v) <= lambda when
// penalized.
double split_lower_bound(const SparsityStructure& st, const RepresentationMap& rep,
                         const RecoveryProblem& pb, const SplitSolution& s, bool penalized,
                         double lambda) {
  Vector f = s.dual_w;
  Vector v = s.dual_r;
  if (rep.identity) {
    f = -(pb.A.transpose() * v);
  } else {
    const Matrix btb = rep.B.transpose() * rep.B;
    const Vector resid = rep.B.transpose() * f + pb.A.transpose() * v;
    f -= rep.B * btb.ldlt().solve(resid);
  }
  double scale = std::max(1.0, structure_norm(st, f, true));
  const double phi_dual = vector_norm(v, dual(pb.phi));
  if (penalized) scale = std::max(scale, phi_dual / lambda);
  v /= scale;
  double bound = -v.dot(pb.y);
  if (!penalized) bound -= pb.epsilon * phi_dual / scale;
  return bound;
}

RecoveryResult solve_by_split(const RecoveryProblem& pb, const SparsityStructure& st,
                              const RepresentationMap& rep, bool penalized, double lambda,
                              const RecoveryOptions& opt) {
  SplitProblem sp;
  sp.A = pb.A;
  sp.B = rep.B;
  sp.b_identity = rep.identity;
  sp.y = pb.y;
  sp.norm = [&st](const Vector& w) { return structure_norm(st, w); };
  sp.prox = [&st](const Vector& w, double tau) { return prox_structure_norm(st, w, tau); };
  sp.phi = pb.phi;
  sp.penalty = penalized ? PenaltyKind::Scaled : PenaltyKind::BallIndicator;
  sp.epsilon = pb.epsilon;
  sp.lambda = lambda;
  sp.tol = opt.tol;
  sp.max_iterations = opt.max_iterations;
  const SplitSolution s = solve_split(sp);
  Vector x = s.u;
  if (!penalized && pb.epsilon == 0.0 && pb.A.rows() > 0) {
    x -= pseudo_inverse(pb.A) * (pb.A * x - pb.y);
  }
  const double lb = split_lower_bound(st, rep, pb, s, penalized, lambda);
  return finish(st, rep, pb, x, penalized, lambda, lb, s.report, Backend::Split);
}

RecoveryResult dispatch(const RecoveryProblem& pb, const SparsityStructure& st, bool penalized,
                        double lambda, const RecoveryOptions& opt) {
  check_problem(pb, st);
  const RepresentationMap rep = representation_map(st);
  const bool lp_ok = lp_expressible(st, pb.phi, pb.epsilon, penalized, pb.A.rows());
  Backend backend = opt.backend;
  if (backend == Backend::Auto) backend = lp_ok ? Backend::Lp : Backend::Split;
  if (backend == Backend::Lp && !lp_ok)
    throw Unsupported("recovery: this program has no linear-programming form");
  if (backend == Backend::Lp) return solve_by_lp(pb, st, rep, penalized, lambda);

  if (!penalized) {
    const double floor = min_residual(pb.A, pb.y, pb.phi);
    const double slack = 1e-9 * (1.0 + pb.y.norm());
    if (pb.epsilon + slack < floor) {
      RecoveryResult res;
      res.x_hat = Vector::Zero(st.dim_x());
      res.w_hat = rep.apply(res.x_hat);
      res.report.status = SolveStatus::Infeasible;
      res.backend = Backend::Split;
      res.delta = kInf;
      res.delta_phi = kInf;
      return res;
    }
  }
  return solve_by_split(pb, st, rep, penalized, lambda, opt);
}

}  // namespace

bool lp_expressible(const SparsityStructure& st, NormTag phi, double epsilon, bool penalized,
                    Eigen::Index rows) {
  if (!polyhedral_norm(st)) return false;
  if (!penalized && epsilon == 0.0) return true;
  return polyhedral_phi(phi, rows);
}

double min_residual(const Matrix& a, const Vector& y, NormTag phi) {
  if (a.rows() == 0) return 0.0;
  if (phi == NormTag::L2 || a.rows() == 1) {
    const Vector r = y - a * (pseudo_inverse(a) * y);
    return vector_norm(r, phi);
  }
  LpBuilder b;
  const int u0 = b.add_variables(static_cast<int>(a.cols()), -kInf, kInf, 0.0);
  detail::add_residual_epigraph(b, a, y, u0, phi, 1.0);
  const LpSolution sol = solve_lp(b.build());
  return std::max(0.0, sol.report.objective);
}

RecoveryResult recover_regular(const RecoveryProblem& problem, const SparsityStructure& structure,
                               const RecoveryOptions& options) {
  return dispatch(problem, structure, false, 0.0, options);
}

RecoveryResult recover_penalized(const RecoveryProblem& problem,
                                 const SparsityStructure& structure, double lambda,
                                 const RecoveryOptions& options) {
  if (!(lambda > 0)) throw Error("recover_penalized: lambda must be positive");
  return dispatch(problem, structure, true, lambda, options);
}

double error_bound(double gamma, double beta, const ErrorBudget& bu, BoundMode mode) {
  if (!(gamma < 1.0)) throw GammaTooLarge("error_bound: gamma must be < 1");
  if (gamma < 0 || beta < 0) throw Error("error_bound: gamma and beta must be nonnegative");
  for (double v : {bu.epsilon, bu.delta_x, bu.delta_phi, bu.delta, bu.phi_xi})
    if (!(v >= 0)) throw Error("error_bound: budget entries must be nonnegative");
  const double denom = 1.0 - gamma;
  if (mode == BoundMode::Regular) {
    const double noise = 2.0 * bu.epsilon + bu.delta_phi;
    const double beta_term = noise == 0.0 ? 0.0 : beta * noise;
    return (beta_term + bu.delta + 2.0 * bu.delta_x) / denom;
  }
  if (bu.lambda < beta) throw LambdaBelowBeta("error_bound: penalized bound needs lambda >= beta");
  return (2.0 * bu.delta_x + bu.delta + 2.0 * bu.lambda * bu.phi_xi) / denom;
}

}  // namespace structrec
