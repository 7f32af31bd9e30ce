#include "structrec/split.hpp"

#include "structrec/norms.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace structrec {
namespace {

Vector prox_penalty(const SplitProblem& sp, const Vector& v, double rho) {
  if (sp.penalty == PenaltyKind::BallIndicator) return project_ball(v, sp.phi, sp.epsilon);
  return prox_vector_norm(v, sp.phi, sp.lambda / rho);
}

}  // namespace

SplitSolution solve_split(const SplitProblem& sp) {
  const Eigen::Index d = sp.A.cols();
  const Eigen::Index m = sp.A.rows();
  if (sp.y.size() != m) throw DimensionMismatch("solve_split: y does not match A");
  if (!sp.b_identity && sp.B.cols() != d) throw DimensionMismatch("solve_split: B does not match A");
  if (sp.rho <= 0 || sp.tol <= 0) throw Error("solve_split: rho and tol must be positive");
  if (!sp.norm || !sp.prox) throw Error("solve_split: norm and prox are required");

  auto apply_b = [&](const Vector& u) -> Vector { return sp.b_identity ? u : Vector(sp.B * u); };
  auto apply_bt = [&](const Vector& w) -> Vector {
    return sp.b_identity ? w : Vector(sp.B.transpose() * w);
  };

  SplitSolution out;
  Matrix normal = sp.A.transpose() * sp.A;
  if (sp.b_identity) normal.diagonal().array() += 1.0;
  else normal += sp.B.transpose() * sp.B;
  Eigen::LDLT<Matrix> ldlt(normal);
  const double scale = std::max(1.0, normal.diagonal().cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-14 * scale) {
    normal.diagonal().array() += 1e-10;
    ldlt.compute(normal);
    out.report.regularized = true;
  }

  const Eigen::Index e = sp.b_identity ? d : sp.B.rows();
  Vector u = Vector::Zero(d);
  Vector w = Vector::Zero(e);
  Vector r = -sp.y;
  r = prox_penalty(sp, r, sp.rho);
  Vector mu = Vector::Zero(e);  // scaled duals
  Vector nu = Vector::Zero(m);
  double rho = sp.rho;
  const double alpha = sp.relaxation;

  double pri = 0.0;
  double dua = 0.0;
  int it = 0;
  bool converged = false;
  for (it = 1; it <= sp.max_iterations; ++it) {
    const Vector rhs = apply_bt(w - mu) + sp.A.transpose() * (sp.y + r - nu);
    u = ldlt.solve(rhs);
    const Vector bu = apply_b(u);
    const Vector au = sp.A * u - sp.y;
    const Vector bu_hat = alpha * bu + (1.0 - alpha) * w;
    const Vector au_hat = alpha * au + (1.0 - alpha) * r;

    const Vector w_old = w;
    const Vector r_old = r;
    w = sp.prox(bu_hat + mu, 1.0 / rho);
    r = prox_penalty(sp, au_hat + nu, rho);
    mu += bu_hat - w;
    nu += au_hat - r;

    pri = std::sqrt((bu - w).squaredNorm() + (au - r).squaredNorm());
    dua = rho * (apply_bt(w - w_old) + sp.A.transpose() * (r - r_old)).norm();
    const double pri_scale =
        std::max({1.0, std::sqrt(bu.squaredNorm() + au.squaredNorm()),
                  std::sqrt(w.squaredNorm() + r.squaredNorm()), sp.y.norm()});
    const double dua_scale =
        std::max(1.0, rho * (apply_bt(mu) + sp.A.transpose() * nu).norm());
    if (pri <= sp.tol * pri_scale && dua <= sp.tol * dua_scale) {
      converged = true;
      break;
    }
    if (sp.adapt_every > 0 && it % sp.adapt_every == 0) {
      const double rp = pri / pri_scale;
      const double rd = dua / dua_scale;
      if (rp > 10.0 * rd && rho < 1e4) {
        rho *= 2.0;
        mu /= 2.0;
        nu /= 2.0;
      } else if (rd > 10.0 * rp && rho > 1e-4) {
        rho /= 2.0;
        mu *= 2.0;
        nu *= 2.0;
      }
    }
  }

  out.u = u;
  out.w = w;
  out.r = r;
  out.dual_w = rho * mu;
  out.dual_r = rho * nu;
  out.rho = rho;
  out.report.status = converged ? SolveStatus::Optimal : SolveStatus::MaxIter;
  out.report.iterations = converged ? it : sp.max_iterations;
  out.report.primal_residual = pri;
  out.report.dual_residual = dua;
  double obj = sp.norm(apply_b(u));
  if (sp.penalty == PenaltyKind::Scaled) obj += sp.lambda * vector_norm(sp.A * u - sp.y, sp.phi);
  out.report.objective = obj;
  return out;
}

}  // namespace structrec
