#include "structrec/lowrank.hpp"

#include "structrec/linalg.hpp"
#include "structrec/norms.hpp"

#include <algorithm>
#include <cmath>

namespace structrec {
namespace {

void check_square(const Matrix& m, int p, int q, const char* who) {
  if (p < 1 || q < 1) throw Error(std::string(who) + ": p and q must be positive");
  if (m.rows() != p * q || m.cols() != p * q)
    throw DimensionMismatch(std::string(who) + ": expected a pq x pq matrix");
}

// Top-k singular subspace product U_k V_k^T, a subgradient of Sigma_k.
Matrix top_k_subgradient(const Svd& d, int k) {
  const Eigen::Index r = std::min<Eigen::Index>(k, d.sigma.size());
  return d.U.leftCols(r) * d.V.leftCols(r).transpose();
}

double top_k_sum(const Svd& d, int k) {
  return d.sigma.head(std::min<Eigen::Index>(k, d.sigma.size())).sum();
}

}  // namespace

Matrix operator_matrix(const std::function<Matrix(const Matrix&)>& map, int p, int q) {
  const int n = p * q;
  Matrix out(n, n);
  for (int c = 0; c < n; ++c) {
    Matrix e = Matrix::Zero(p, q);
    e(c % p, c / p) = 1.0;
    const Matrix img = map(e);
    if (img.rows() != p || img.cols() != q)
      throw DimensionMismatch("operator_matrix: map must return p x q matrices");
    out.col(c) = vectorize(img);
  }
  return out;
}

Matrix theta(const Matrix& w, int p, int q) {
  check_square(w, p, q, "theta");
  Matrix t(p * q, p * q);
  for (int mu = 0; mu < q; ++mu)
    for (int nu = 0; nu < p; ++nu)
      for (int k = 0; k < p; ++k)
        for (int l = 0; l < q; ++l) t(mu * p + k, nu * q + l) = w(nu + mu * p, k + l * p);
  return t;
}

Matrix theta_inverse(const Matrix& t, int p, int q) {
  check_square(t, p, q, "theta_inverse");
  Matrix w(p * q, p * q);
  for (int mu = 0; mu < q; ++mu)
    for (int nu = 0; nu < p; ++nu)
      for (int k = 0; k < p; ++k)
        for (int l = 0; l < q; ++l) w(nu + mu * p, k + l * p) = t(mu * p + k, nu * q + l);
  return w;
}

Matrix kron_ht_z(const Matrix& h, const Matrix& z) {
  if (h.rows() != z.rows() || h.cols() != z.cols())
    throw DimensionMismatch("kron_ht_z: h and z must have the same shape");
  const Eigen::Index p = h.rows();
  const Eigen::Index q = h.cols();
  Matrix out(p * q, p * q);
  for (Eigen::Index mu = 0; mu < q; ++mu)
    for (Eigen::Index nu = 0; nu < p; ++nu) out.block(mu * p, nu * q, p, q) = h(nu, mu) * z;
  return out;
}

Matrix rearrange(const Matrix& u, int p, int q, Rearrangement which) {
  check_square(u, p, q, "rearrange");
  if (which == Rearrangement::MPrime) {
    Matrix v(p * p, q * q);
    for (int mu = 0; mu < q; ++mu)
      for (int nu = 0; nu < p; ++nu)
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < q; ++j) v(nu * p + i, mu * q + j) = u(mu * p + i, nu * q + j);
    return v;
  }
  Matrix v(p * q, p * q);
  for (int mu = 0; mu < q; ++mu)
    for (int nu = 0; nu < p; ++nu)
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) v(nu * q + mu, j * p + i) = u(mu * p + i, nu * q + j);
  return v;
}

Matrix rearrange_adjoint(const Matrix& v, int p, int q, Rearrangement which) {
  Matrix u(p * q, p * q);
  if (which == Rearrangement::MPrime) {
    if (v.rows() != p * p || v.cols() != q * q)
      throw DimensionMismatch("rearrange_adjoint: expected a p^2 x q^2 matrix");
    for (int mu = 0; mu < q; ++mu)
      for (int nu = 0; nu < p; ++nu)
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < q; ++j) u(mu * p + i, nu * q + j) = v(nu * p + i, mu * q + j);
    return u;
  }
  check_square(v, p, q, "rearrange_adjoint");
  for (int mu = 0; mu < q; ++mu)
    for (int nu = 0; nu < p; ++nu)
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) u(mu * p + i, nu * q + j) = v(nu * q + mu, j * p + i);
  return u;
}

double opt_bar(const Matrix& w, int p, int q, int s) {
  if (s < 0) throw Error("opt_bar: s must be nonnegative");
  const Matrix t = theta(w, p, q);
  const Vector sv = singular_values(t);
  auto head = [&](int k) { return sv.head(std::min<Eigen::Index>(k, sv.size())).sum(); };
  return head(s) + head(2 * s);
}

OptStarResult opt_star(const Matrix& w, int p, int q, int s, const OptStarOptions& opt) {
  if (s < 0) throw Error("opt_star: s must be nonnegative");
  OptStarResult res;
  const Matrix t = theta(w, p, q);
  const double scale = t.norm();
  const int ks[2] = {s, 2 * s};
  for (int idx = 0; idx < 2; ++idx) {
    const int k = ks[idx];
    const double rk = std::sqrt(static_cast<double>(k));
    Matrix t2 = Matrix::Zero(p * q, p * q);
    Matrix t3 = Matrix::Zero(p * q, p * q);
    double best = kInf;
    double first = 0.0;
    int it = 0;
    for (;; ++it) {
      const Svd d1 = svd(t - t2 - t3);
      const Svd d2 = svd(rearrange(t2, p, q, Rearrangement::MPrime));
      const Svd d3 = svd(rearrange(t3, p, q, Rearrangement::MDoublePrime));
      const double f = top_k_sum(d1, k) + top_k_sum(d2, k) + rk * d3.sigma(0);
      if (it == 0) first = f;
      best = std::min(best, f);
      if (it >= opt.iterations || k == 0 || scale == 0.0) break;
      const Matrix g1 = top_k_subgradient(d1, k);
      const Matrix g2 = -g1 + rearrange_adjoint(top_k_subgradient(d2, k), p, q, Rearrangement::MPrime);
      const Matrix g3 =
          -g1 + rk * rearrange_adjoint(d3.U.col(0) * d3.V.col(0).transpose(), p, q,
                                       Rearrangement::MDoublePrime);
      const double gn = std::sqrt(g2.squaredNorm() + g3.squaredNorm());
      if (gn == 0.0) break;
      const double step = opt.step * scale / std::sqrt(static_cast<double>(it + 1)) / gn;
      t2 -= step * g2;
      t3 -= step * g3;
    }
    res.per_k[idx] = best;
    res.value += best;
    res.opt_bar += first;
    res.iterations = std::max(res.iterations, it);
  }
  return res;
}

double sampled_primal_bound(const Matrix& w, int p, int q, int s, int starts, Rng& rng) {
  if (w.rows() != p * q || w.cols() != p * q) throw DimensionMismatch("sampled_primal_bound");
  auto value_at = [&](const Matrix& z) {
    const Matrix wz = reshape(w * vectorize(z), p, q);
    return sigma_sum(wz, s) + sigma_sum(wz, 2 * s);
  };
  double best = 0.0;
  for (int start = 0; start < starts; ++start) {
    Vector a = rng.gaussian_vector(p);
    Vector b = rng.gaussian_vector(q);
    Matrix z = (a / a.norm()) * (b / b.norm()).transpose();
    double cur = value_at(z);
    for (int sweep = 0; sweep < 50; ++sweep) {
      // Given z, the best dual h for each k is U_k V_k^T of W z; then the best
      // rank-one z for the combined h is the top singular pair of W^* h.
      const Svd d = svd(reshape(w * vectorize(z), p, q));
      const Matrix h = top_k_subgradient(d, s) + top_k_subgradient(d, 2 * s);
      const Matrix adj = reshape(w.transpose() * vectorize(h), p, q);
      const Svd da = svd(adj);
      const Matrix znew = da.U.col(0) * da.V.col(0).transpose();
      const double v = value_at(znew);
      if (v <= cur + 1e-14 * (1.0 + cur)) {
        cur = std::max(cur, v);
        break;
      }
      cur = v;
      z = znew;
    }
    best = std::max(best, cur);
  }
  return best;
}

double badnews_floor(const Matrix& a, int p, int q, int s) {
  if (a.cols() != p * q) throw DimensionMismatch("badnews_floor: A must have pq columns");
  const double n = static_cast<double>(p * q);
  const double d = n - numerical_rank(a);
  return std::min(2.0 * s * std::sqrt(d / n), std::sqrt(d));
}

BadNews badnews_check(const Matrix& a, const Matrix& h, int p, int q, int s) {
  if (h.rows() != a.rows() || h.cols() != a.cols())
    throw DimensionMismatch("badnews_check: H must have the shape of A");
  BadNews out;
  const Matrix w = Matrix::Identity(p * q, p * q) - h.transpose() * a;
  out.lhs = opt_bar(w, p, q, s);
  out.floor = badnews_floor(a, p, q, s);
  out.holds = out.lhs >= out.floor - 1e-6;
  return out;
}

}  // namespace structrec
