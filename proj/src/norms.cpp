#include "structrec/norms.hpp"

#include "structrec/knapsack.hpp"
#include "structrec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace structrec {
namespace {

constexpr int kMaxEnumerationDim = 12;

int floor_level(double s) { return s <= 0 ? 0 : static_cast<int>(std::floor(s + 1e-12)); }

// max over u in {-1,1}^cols (first sign fixed) of f(Q u).
double max_over_signs(const Matrix& q, const std::function<double(const Vector&)>& f) {
  const int c = static_cast<int>(q.cols());
  double best = 0.0;
  const unsigned long count = 1UL << (c - 1);
  Vector u(c);
  for (unsigned long mask = 0; mask < count; ++mask) {
    u(0) = 1.0;
    for (int j = 1; j < c; ++j) u(j) = (mask >> (j - 1)) & 1UL ? -1.0 : 1.0;
    best = std::max(best, f(q * u));
  }
  return best;
}

Vector soft_threshold(const Vector& v, double tau) {
  return v.array().sign() * (v.array().abs() - tau).max(0.0);
}

}  // namespace

double vector_norm(const Vector& v, NormTag tag) {
  if (v.size() == 0) return 0.0;
  switch (tag) {
    case NormTag::L1: return v.lpNorm<1>();
    case NormTag::L2: return v.norm();
    case NormTag::LInf: return v.lpNorm<Eigen::Infinity>();
    default: break;
  }
  throw Unsupported("vector_norm: " + to_string(tag) + " is a matrix norm");
}

double matrix_norm(const Matrix& m, NormTag tag) {
  if (m.size() == 0) return 0.0;
  switch (tag) {
    case NormTag::Nuclear: return singular_values(m).sum();
    case NormTag::Spectral: return singular_values(m)(0);
    default: return vector_norm(Eigen::Map<const Vector>(m.data(), m.size()), tag);
  }
}

double sum_top(const Vector& x, int s) {
  if (s < 0) throw Error("sum_top: s must be nonnegative");
  std::vector<double> mags(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[i] = std::abs(x(i));
  const std::size_t k = std::min<std::size_t>(s, mags.size());
  std::partial_sort(mags.begin(), mags.begin() + k, mags.end(), std::greater<>());
  return std::accumulate(mags.begin(), mags.begin() + k, 0.0);
}

double pi_s(const Vector& u, const std::vector<double>& chi, double s, PiVariant variant) {
  if (static_cast<std::size_t>(u.size()) != chi.size())
    throw DimensionMismatch("pi_s: weights and vector differ in length");
  if (s < 0) throw Error("pi_s: s must be nonnegative");
  std::vector<double> mags(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) mags[i] = std::abs(u(i));
  if (variant == PiVariant::Hat) return 2.0 * knapsack_relaxed(mags, chi, s);
  return 2.0 * knapsack_max(mags, chi, s, KnapsackMethod::Exact).value;
}

double sigma_sum(const Matrix& z, int k) {
  if (k < 0) throw Error("sigma_sum: k must be nonnegative");
  if (k == 0 || z.size() == 0) return 0.0;
  const Vector sv = singular_values(z);
  return sv.head(std::min<Eigen::Index>(k, sv.size())).sum();
}

double structure_norm(const SparsityStructure& st, const Vector& w, bool dual_norm) {
  st.check_e(w);
  switch (st.kind()) {
    case StructureKind::Plain:
      return vector_norm(w, dual_norm ? NormTag::LInf : NormTag::L1);
    case StructureKind::Group: {
      double acc = 0.0;
      for (int l = 0; l < st.num_blocks(); ++l) {
        const Vector blk = w.segment(st.block_offset(l), st.block_size(l));
        if (dual_norm)
          acc = std::max(acc, vector_norm(blk, dual(st.block_norm(l))));
        else
          acc += vector_norm(blk, st.block_norm(l));
      }
      return acc;
    }
    case StructureKind::LowRank:
      return matrix_norm(reshape(w, st.rows(), st.cols()),
                         dual_norm ? NormTag::Spectral : NormTag::Nuclear);
  }
  return 0.0;
}

double ps_seminorm(const SparsityStructure& st, const Vector& z, double s) {
  st.check_e(z);
  switch (st.kind()) {
    case StructureKind::Plain:
      return 2.0 * sum_top(z, floor_level(s));
    case StructureKind::Group: {
      const Vector norms = st.block_norms(z);
      try {
        return pi_s(norms, st.weights(), s, PiVariant::Exact);
      } catch (const Unsupported&) {
        return pi_s(norms, st.weights(), s, PiVariant::Hat);
      }
    }
    case StructureKind::LowRank: {
      const int k = floor_level(s);
      const Matrix m = reshape(z, st.rows(), st.cols());
      return sigma_sum(m, k) + sigma_sum(m, 2 * k);
    }
  }
  return 0.0;
}

InducedNorm induced_norm(const Matrix& q, NormTag from, NormTag to) {
  if (!is_vector_norm(from) || !is_vector_norm(to))
    throw Unsupported("induced_norm: only l1, l2 and linf block norms");
  if (q.size() == 0) return {0.0, true};
  const Eigen::Index r = q.rows();
  const Eigen::Index c = q.cols();

  if (from == NormTag::L1) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < c; ++j) best = std::max(best, vector_norm(q.col(j), to));
    return {best, true};
  }
  if (to == NormTag::LInf) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < r; ++i)
      best = std::max(best, vector_norm(q.row(i).transpose(), dual(from)));
    return {best, true};
  }
  const double sigma1 = singular_values(q)(0);
  if (from == NormTag::L2 && to == NormTag::L2) return {sigma1, true};

  const double rd = static_cast<double>(r);
  const double cd = static_cast<double>(c);
  auto l2 = [](const Vector& v) { return v.norm(); };
  auto l1 = [](const Vector& v) { return v.lpNorm<1>(); };

  if (from == NormTag::LInf && to == NormTag::L2) {
    if (c <= kMaxEnumerationDim) return {max_over_signs(q, l2), true};
    const double row_bound = q.cwiseAbs().rowwise().sum().norm();
    return {std::min(std::sqrt(cd) * sigma1, row_bound), false};
  }
  if (from == NormTag::L2 && to == NormTag::L1) {
    // ||Q||_{2->1} = ||Q^T||_{inf->2}
    if (r <= kMaxEnumerationDim) return {max_over_signs(q.transpose(), l2), true};
    const double rows_l2 = q.rowwise().norm().sum();
    return {std::min(std::sqrt(rd) * sigma1, rows_l2), false};
  }
  // linf -> l1; symmetric under transposition
  if (c <= std::min<Eigen::Index>(r, kMaxEnumerationDim)) return {max_over_signs(q, l1), true};
  if (r <= kMaxEnumerationDim) return {max_over_signs(q.transpose(), l1), true};
  const double entrywise = q.cwiseAbs().sum();
  const double spectral = std::sqrt(rd * cd) * sigma1;
  const double chain = std::sqrt(rd) * std::min(std::sqrt(cd) * sigma1,
                                                q.cwiseAbs().rowwise().sum().norm());
  return {std::min({entrywise, spectral, chain}), false};
}

OmegaMatrix omega(const SparsityStructure& st, const Matrix& w) {
  if (st.kind() == StructureKind::LowRank)
    throw Unsupported("omega: defined for block-partitioned spaces only");
  const int n = st.dim_e();
  if (w.rows() != n || w.cols() != n) throw DimensionMismatch("omega: W must be dim(E) x dim(E)");
  OmegaMatrix out;
  if (st.kind() == StructureKind::Plain) {
    out.values = w.cwiseAbs();
    return out;
  }
  const int k = st.num_blocks();
  out.values = Matrix::Zero(k, k);
  for (int row = 0; row < k; ++row) {
    for (int col = 0; col < k; ++col) {
      const Matrix blk =
          w.block(st.block_offset(row), st.block_offset(col), st.block_size(row), st.block_size(col));
      const InducedNorm v = induced_norm(blk, st.block_norm(col), st.block_norm(row));
      out.values(row, col) = v.value;
      out.exact = out.exact && v.exact;
    }
  }
  return out;
}

Vector prox_structure_norm(const SparsityStructure& st, const Vector& w, double tau) {
  st.check_e(w);
  if (tau < 0) throw Error("prox: tau must be nonnegative");
  switch (st.kind()) {
    case StructureKind::Plain:
      return soft_threshold(w, tau);
    case StructureKind::Group: {
      Vector out(w.size());
      for (int l = 0; l < st.num_blocks(); ++l) {
        const auto seg = w.segment(st.block_offset(l), st.block_size(l));
        out.segment(st.block_offset(l), st.block_size(l)) =
            prox_vector_norm(seg, st.block_norm(l), tau);
      }
      return out;
    }
    case StructureKind::LowRank: {
      const Svd d = svd(reshape(w, st.rows(), st.cols()));
      const Vector shrunk = (d.sigma.array() - tau).max(0.0);
      return vectorize(d.U * shrunk.asDiagonal() * d.V.transpose());
    }
  }
  return w;
}

Vector project_ball(const Vector& v, NormTag phi, double radius) {
  if (radius < 0) throw Error("project_ball: radius must be nonnegative");
  if (radius == 0) return Vector::Zero(v.size());
  switch (phi) {
    case NormTag::LInf:
      return v.cwiseMax(-radius).cwiseMin(radius);
    case NormTag::L2: {
      const double nv = v.norm();
      return nv <= radius ? v : Vector(v * (radius / nv));
    }
    case NormTag::L1: {
      if (v.lpNorm<1>() <= radius) return v;
      std::vector<double> mu(v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) mu[i] = std::abs(v(i));
      std::sort(mu.begin(), mu.end(), std::greater<>());
      double cumsum = 0.0;
      double theta = 0.0;
      for (std::size_t j = 0; j < mu.size(); ++j) {
        cumsum += mu[j];
        const double t = (cumsum - radius) / static_cast<double>(j + 1);
        if (mu[j] - t > 0) theta = t;
      }
      return soft_threshold(v, theta);
    }
    default:
      break;
  }
  throw Unsupported("project_ball: phi must be l1, l2 or linf");
}

Vector prox_vector_norm(const Vector& v, NormTag phi, double tau) {
  if (tau <= 0) return v;
  return v - project_ball(v, dual(phi), tau);
}

}  // namespace structrec
