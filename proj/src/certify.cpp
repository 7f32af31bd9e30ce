#include "structrec/certify.hpp"

#include "structrec/knapsack.hpp"
#include "structrec/linalg.hpp"
#include "structrec/norms.hpp"
#include "structrec/rng.hpp"

#include "lp_forms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace structrec {

std::string to_string(CertMethod method) {
  switch (method) {
    case CertMethod::BruteForce: return "bruteforce";
    case CertMethod::ColumnLP: return "column-lp";
    case CertMethod::LowRankUBar: return "ubar";
    case CertMethod::LowRankUStar: return "ustar";
  }
  return "?";
}

CertMethod cert_method_from_string(std::string_view name) {
  if (name == "bruteforce") return CertMethod::BruteForce;
  if (name == "column-lp") return CertMethod::ColumnLP;
  if (name == "ubar") return CertMethod::LowRankUBar;
  if (name == "ustar") return CertMethod::LowRankUStar;
  throw Error("unknown certificate method: " + std::string(name));
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::CertifiedGood: return "certified_good";
    case Verdict::CertifiedBad: return "certified_bad";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace {

constexpr double kHalfMargin = 1e-9;

int level(double s) { return s <= 0 ? 0 : static_cast<int>(std::floor(s + 1e-12)); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool polyhedral_group(const SparsityStructure& st) {
  for (int l = 0; l < st.num_blocks(); ++l)
    if (st.block_size(l) > 1 && st.block_norm(l) == NormTag::L2) return false;
  return true;
}

// B^+ = (B^T B)^{-1} B^T for a group representation map: the column of E
// coordinate (l, k) is e_i / (number of blocks containing i).
Matrix group_pinv(const SparsityStructure& st) {
  Matrix bp = Matrix::Zero(st.dim_x(), st.dim_e());
  std::vector<int> count(st.dim_x(), 0);
  for (int l = 0; l < st.num_blocks(); ++l)
    for (int i : st.block(l)) ++count[i];
  for (int l = 0; l < st.num_blocks(); ++l)
    for (int k = 0; k < st.block_size(l); ++k) {
      const int i = st.block(l)[k];
      bp(i, st.block_offset(l) + k) = 1.0 / count[i];
    }
  return bp;
}

void set_verdict(NullspaceVerdict& v, double value) {
  v.lo = v.hi = value;
  v.status = value < 0.5 - kHalfMargin ? Verdict::CertifiedGood : Verdict::CertifiedBad;
  if (v.status == Verdict::CertifiedBad && value < 0.5 + kHalfMargin)
    v.note = "tie at 1/2: the nullspace inequality holds only with equality";
}

// --- dual extreme points of block norms --------------------------------------

// Extreme points of the unit ball of the dual block norm; for the first block
// of a pattern only half of them (the other half follows from z -> -z).
std::vector<Vector> block_dual_extremes(NormTag norm, int size, bool half) {
  std::vector<Vector> out;
  if (size == 1) {
    out.push_back(Vector::Ones(1));
    if (!half) out.push_back(-Vector::Ones(1));
    return out;
  }
  if (norm == NormTag::L1) {  // dual linf ball: sign vectors
    const unsigned long count = 1UL << size;
    for (unsigned long mask = 0; mask < count; ++mask) {
      Vector v(size);
      for (int j = 0; j < size; ++j) v(j) = (mask >> j) & 1UL ? -1.0 : 1.0;
      if (half && v(0) < 0) continue;
      out.push_back(v);
    }
    return out;
  }
  // linf block: dual l1 ball, vertices +-e_j
  for (int j = 0; j < size; ++j) {
    Vector v = Vector::Zero(size);
    v(j) = 1.0;
    out.push_back(v);
    if (!half) out.push_back(-v);
  }
  return out;
}

// Enumerates linear functionals a on X with
//   max_a a^T z = max_{P in P_s} ||P B z||  (group, polyhedral blocks).
// Returns false without calling f when the count exceeds the budget.
bool for_each_group_functional(const SparsityStructure& st, double s, double budget,
                               const std::function<void(const Vector&, const BlockProjector&)>& f) {
  const auto sets = enumerate_projectors(st, s);
  double total = 0.0;
  for (const auto& pd : *sets) {
    const auto& bp = std::get<BlockProjector>(pd);
    double c = 1.0;
    for (std::size_t t = 0; t < bp.blocks.size(); ++t) {
      const int l = bp.blocks[t];
      c *= static_cast<double>(block_dual_extremes(st.block_norm(l), st.block_size(l), t == 0).size());
    }
    if (bp.blocks.empty()) c = 0.0;
    total += c;
  }
  if (total > budget) return false;
  for (const auto& pd : *sets) {
    const auto& bp = std::get<BlockProjector>(pd);
    if (bp.blocks.empty()) continue;
    std::vector<std::vector<Vector>> choices;
    for (std::size_t t = 0; t < bp.blocks.size(); ++t) {
      const int l = bp.blocks[t];
      choices.push_back(block_dual_extremes(st.block_norm(l), st.block_size(l), t == 0));
    }
    std::vector<std::size_t> pick(choices.size(), 0);
    while (true) {
      Vector a = Vector::Zero(st.dim_x());
      for (std::size_t t = 0; t < choices.size(); ++t) {
        const int l = bp.blocks[t];
        const Vector& e = choices[t][pick[t]];
        for (int k = 0; k < st.block_size(l); ++k) a(st.block(l)[k]) += e(k);
      }
      f(a, bp);
      std::size_t t = 0;
      while (t < pick.size() && ++pick[t] == choices[t].size()) pick[t++] = 0;
      if (t == pick.size()) break;
    }
  }
  return true;
}

// --- plain brute force --------------------------------------------------------

// Calls f(support, signs) for every support of size k and sign pattern with
// the first sign fixed to +1.
void for_each_signed_support(int n, int k,
                             const std::function<void(const std::vector<int>&, const Vector&)>& f) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  const unsigned long patterns = k == 0 ? 1UL : 1UL << (k - 1);
  while (true) {
    for (unsigned long mask = 0; mask < patterns; ++mask) {
      Vector sigma = Vector::Ones(k);
      for (int j = 1; j < k; ++j) sigma(j) = (mask >> (j - 1)) & 1UL ? -1.0 : 1.0;
      f(idx, sigma);
    }
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

NullspaceVerdict plain_bruteforce(const Matrix& a, int n, double s, const BruteForceOptions& opt) {
  NullspaceVerdict v;
  const int k = std::min(level(s), n);
  const Matrix kernel = kernel_basis(a);
  if (k == 0 || kernel.cols() == 0) {
    set_verdict(v, 0.0);
    v.witness = Vector::Zero(n);
    v.note = kernel.cols() == 0 ? "trivial kernel" : "s < 1";
    return v;
  }
  const double count = binomial(n, k) * std::pow(2.0, k - 1);
  if (count > static_cast<double>(opt.max_lps)) {
    v.status = Verdict::Unknown;
    v.lo = 0.0;
    v.hi = 1.0;
    v.note = "budget exceeded: " + std::to_string(static_cast<long long>(count)) + " LPs needed";
    return v;
  }
  // z = u - v with u, v >= 0; A z = 0; sum(u + v) <= 1.
  LpBuilder b;
  const int u0 = b.add_variables(n);
  const int v0 = b.add_variables(n);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    std::vector<std::pair<int, double>> e;
    for (int j = 0; j < n; ++j)
      if (a(i, j) != 0.0) {
        e.emplace_back(u0 + j, a(i, j));
        e.emplace_back(v0 + j, -a(i, j));
      }
    b.add_row(e, RowSense::Equal, 0.0);
  }
  std::vector<std::pair<int, double>> l1;
  for (int j = 0; j < 2 * n; ++j) l1.emplace_back(j, 1.0);
  b.add_row(l1, RowSense::LessEqual, 1.0);
  LinearProgram lp = b.build();

  double best = -1.0;
  for_each_signed_support(n, k, [&](const std::vector<int>& idx, const Vector& sigma) {
    lp.c.setZero();
    for (int t = 0; t < k; ++t) {
      lp.c(u0 + idx[t]) = -sigma(t);
      lp.c(v0 + idx[t]) = sigma(t);
    }
    const LpSolution sol = solve_lp(lp);
    ++v.lps_solved;
    if (sol.report.status != SolveStatus::Optimal) throw Error("gamma_s: LP failed");
    const double value = -sol.report.objective;
    if (value > best) {
      best = value;
      v.witness = sol.x.segment(u0, n) - sol.x.segment(v0, n);
      v.witness_projector = SupportProjector{idx};
    }
  });
  set_verdict(v, std::max(0.0, best));
  return v;
}

NullspaceVerdict group_bruteforce(const Matrix& a, const SparsityStructure& st, double s,
                                  const BruteForceOptions& opt) {
  NullspaceVerdict v;
  const int n = st.dim_x();
  if (kernel_basis(a).cols() == 0) {
    set_verdict(v, 0.0);
    v.witness = Vector::Zero(n);
    v.note = "trivial kernel";
    return v;
  }
  // z free; epigraph of ||Bz|| with sum <= 1; A z = 0.
  LpBuilder b;
  const int z0 = b.add_variables(n, -kInf, kInf, 0.0);
  detail::add_sum_bound(b, detail::add_norm_epigraph(b, st, z0, 0.0), 1.0);
  detail::add_equality(b, a, Vector::Zero(a.rows()), z0);
  LinearProgram lp = b.build();
  double best = 0.0;
  v.witness = Vector::Zero(n);
  const bool ok = for_each_group_functional(
      st, s, static_cast<double>(opt.max_lps), [&](const Vector& f, const BlockProjector& bp) {
        lp.c.setZero();
        lp.c.segment(z0, n) = -f;
        const LpSolution sol = solve_lp(lp);
        ++v.lps_solved;
        if (sol.report.status != SolveStatus::Optimal) throw Error("gamma_s: LP failed");
        const double value = -sol.report.objective;
        if (value > best || !v.witness_projector) {
          best = std::max(best, value);
          v.witness = sol.x.segment(z0, n);
          v.witness_projector = bp;
        }
      });
  if (!ok) {
    v.status = Verdict::Unknown;
    v.lo = 0.0;
    v.hi = 1.0;
    v.note = "budget exceeded";
    return v;
  }
  set_verdict(v, best);
  return v;
}

// --- sampled ascent (nonpolyhedral cases) ------------------------------------

struct RatioEval {
  double ratio = 0.0;
  Vector grad_w;  // subgradient of the ratio with respect to w = Bz
  ProjectorDesc projector;
};

// r(w) = max_{P in P_s} ||P w|| / ||w|| with a subgradient.
RatioEval ratio_eval(const SparsityStructure& st, const Vector& w, double s) {
  RatioEval out;
  const double norm = structure_norm(st, w);
  if (norm <= 0) {
    out.grad_w = Vector::Zero(w.size());
    return out;
  }
  Vector g_top = Vector::Zero(w.size());
  Vector g_norm = Vector::Zero(w.size());
  double top = 0.0;
  switch (st.kind()) {
    case StructureKind::Plain: {
      const int k = std::min(level(s), static_cast<int>(w.size()));
      std::vector<int> order(w.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int x, int y) { return std::abs(w(x)) > std::abs(w(y)); });
      std::vector<int> support(order.begin(), order.begin() + k);
      for (int i : support) {
        top += std::abs(w(i));
        g_top(i) = w(i) >= 0 ? 1.0 : -1.0;
      }
      g_norm = w.unaryExpr([](double x) { return x >= 0 ? 1.0 : -1.0; });
      std::sort(support.begin(), support.end());
      out.projector = SupportProjector{support};
      break;
    }
    case StructureKind::Group: {
      const Vector bn = st.block_norms(w);
      std::vector<double> values(bn.data(), bn.data() + bn.size());
      const KnapsackResult kr = knapsack_max(values, st.weights(), s, KnapsackMethod::Auto);
      std::vector<bool> in(st.num_blocks(), false);
      for (int l : kr.chosen) in[l] = true;
      for (int l = 0; l < st.num_blocks(); ++l) {
        const Vector blk = w.segment(st.block_offset(l), st.block_size(l));
        Vector g(blk.size());
        switch (st.block_norm(l)) {
          case NormTag::L1: g = blk.unaryExpr([](double x) { return x >= 0 ? 1.0 : -1.0; }); break;
          case NormTag::L2: g = bn(l) > 0 ? Vector(blk / bn(l)) : Vector(Vector::Zero(blk.size())); break;
          default: {
            g.setZero();
            Eigen::Index j = 0;
            blk.cwiseAbs().maxCoeff(&j);
            g(j) = blk(j) >= 0 ? 1.0 : -1.0;
          }
        }
        g_norm.segment(st.block_offset(l), st.block_size(l)) = g;
        if (in[l]) {
          g_top.segment(st.block_offset(l), st.block_size(l)) = g;
          top += bn(l);
        }
      }
      out.projector = BlockProjector{kr.chosen};
      break;
    }
    case StructureKind::LowRank: {
      const int k = std::min(level(s), st.cols());
      const Svd d = svd(reshape(w, st.rows(), st.cols()));
      top = d.sigma.head(k).sum();
      g_top = vectorize(d.U.leftCols(k) * d.V.leftCols(k).transpose());
      const double tol = 1e-12 * std::max(1.0, d.sigma(0));
      Eigen::Index r = 0;
      while (r < d.sigma.size() && d.sigma(r) > tol) ++r;
      g_norm = vectorize(d.U.leftCols(r) * d.V.leftCols(r).transpose());
      out.projector = SubspaceProjector{d.U.leftCols(k), d.V.leftCols(k)};
      break;
    }
  }
  out.ratio = top / norm;
  out.grad_w = (g_top * norm - g_norm * top) / (norm * norm);
  return out;
}

NullspaceVerdict sampled_bruteforce(const Matrix& a, const SparsityStructure& st, double s,
                                    const BruteForceOptions& opt) {
  NullspaceVerdict v;
  const Matrix kernel = kernel_basis(a);
  const RepresentationMap rep = representation_map(st);
  v.hi = 1.0;
  v.witness = Vector::Zero(st.dim_x());
  if (kernel.cols() == 0) {
    set_verdict(v, 0.0);
    v.note = "trivial kernel";
    return v;
  }
  const Matrix bk = rep.identity ? kernel : Matrix(rep.B * kernel);
  Rng rng(opt.seed);
  double best = -1.0;
  for (int start = 0; start < opt.starts; ++start) {
    Vector c = rng.gaussian_vector(kernel.cols());
    c /= c.norm();
    for (int step = 1; step <= opt.ascent_steps; ++step) {
      const Vector w = bk * c;
      const RatioEval re = ratio_eval(st, w, s);
      if (re.ratio > best) {
        best = re.ratio;
        v.witness = kernel * c;
        v.witness_projector = re.projector;
      }
      const Vector g = bk.transpose() * re.grad_w;
      const double gn = g.norm();
      if (gn <= 1e-14) break;
      c += (0.3 / std::sqrt(static_cast<double>(step))) * g / gn;
      c /= c.norm();
    }
  }
  v.lo = std::max(0.0, best);
  if (v.lo >= 0.5) {
    v.status = Verdict::CertifiedBad;
    v.note = "sampled witness violates the nullspace inequality";
  } else {
    v.status = Verdict::Unknown;
    v.note = "sampled ascent: bracket [lo, 1]";
  }
  return v;
}

// --- worst-case left-hand side of C_s ------------------------------------------

// max over P in P_s of ||Pw|| + ||w|| - ||P̄w|| with the maximizing P.
std::pair<double, ProjectorDesc> worst_lhs(const SparsityStructure& st, const Vector& w, double s) {
  switch (st.kind()) {
    case StructureKind::Plain: {
      const RatioEval re = ratio_eval(st, w, s);
      const Vector kept = project(st, re.projector, w, ProjectSide::Direct);
      return {2.0 * kept.lpNorm<1>(), re.projector};
    }
    case StructureKind::Group: {
      const Vector bn = st.block_norms(w);
      std::vector<double> values(bn.data(), bn.data() + bn.size());
      const KnapsackResult kr = knapsack_max(values, st.weights(), s, KnapsackMethod::Auto);
      return {2.0 * kr.value, BlockProjector{kr.chosen}};
    }
    case StructureKind::LowRank: {
      const RatioEval re = ratio_eval(st, w, s);
      const ProjectorDesc& p = re.projector;
      const double lhs = structure_norm(st, project(st, p, w, ProjectSide::Direct)) +
                         structure_norm(st, w) -
                         structure_norm(st, project(st, p, w, ProjectSide::Complement));
      return {lhs, p};
    }
  }
  return {0.0, SupportProjector{}};
}

double exact_gamma(const SparsityStructure& st, const Matrix& w, double s, bool& exact) {
  const OmegaMatrix om = omega(st, w);
  exact = om.exact;
  const std::vector<double> chi =
      st.kind() == StructureKind::Plain ? std::vector<double>(st.dim_e(), 1.0) : st.weights();
  double gamma = 0.0;
  for (Eigen::Index l = 0; l < om.values.cols(); ++l) {
    const Vector col = om.values.col(l);
    double v = 0.0;
    try {
      v = pi_s(col, chi, s, PiVariant::Exact);
    } catch (const Unsupported&) {
      v = pi_s(col, chi, s, PiVariant::Hat);
      exact = false;
    }
    gamma = std::max(gamma, v);
  }
  return gamma;
}

}  // namespace

// -----------------------------------------------------------------------------

NullspaceVerdict gamma_s_bruteforce(const Matrix& A, const SparsityStructure& st, double s,
                                    const BruteForceOptions& options) {
  if (A.cols() != st.dim_x()) throw DimensionMismatch("gamma_s_bruteforce: A has wrong width");
  if (s < 0) throw Error("gamma_s_bruteforce: s must be nonnegative");
  switch (st.kind()) {
    case StructureKind::Plain: return plain_bruteforce(A, st.dim_x(), s, options);
    case StructureKind::Group:
      if (polyhedral_group(st)) return group_bruteforce(A, st, s, options);
      return sampled_bruteforce(A, st, s, options);
    case StructureKind::LowRank: return sampled_bruteforce(A, st, s, options);
  }
  return {};
}

std::optional<CsViolation> check_condition_Cs(const Matrix& A, const SparsityStructure& st,
                                              double s, double gamma, double beta, NormTag phi,
                                              int trials, std::uint64_t seed) {
  if (A.cols() != st.dim_x()) throw DimensionMismatch("check_condition_Cs: A has wrong width");
  if (trials < 1) throw Error("check_condition_Cs: trials must be >= 1");
  const RepresentationMap rep = representation_map(st);
  const Matrix kernel = kernel_basis(A);
  Rng rng(seed);
  auto violated = [&](const Vector& z, const Vector& w, double lhs,
                      const ProjectorDesc& p) -> std::optional<CsViolation> {
    const double az = A.rows() > 0 ? vector_norm(A * z, phi) : 0.0;
    const double beta_term = az == 0.0 ? 0.0 : beta * az;
    const double rhs = beta_term + gamma * structure_norm(st, w);
    if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs))) return CsViolation{z, p, lhs, rhs};
    return std::nullopt;
  };
  for (int t = 0; t < trials; ++t) {
    Vector z = rng.gaussian_vector(st.dim_x());
    if (t % 2 == 1 && kernel.cols() > 0) z = kernel * (kernel.transpose() * z);
    const Vector w = rep.apply(z);
    const auto [lhs, p] = worst_lhs(st, w, s);
    if (auto v = violated(z, w, lhs, p)) return v;
    if (st.kind() == StructureKind::LowRank) {
      const ProjectorDesc rp = random_projector(st, rng, s);
      const double l2 = structure_norm(st, project(st, rp, w, ProjectSide::Direct)) +
                        structure_norm(st, w) -
                        structure_norm(st, project(st, rp, w, ProjectSide::Complement));
      if (auto v = violated(z, w, l2, rp)) return v;
    }
  }
  return std::nullopt;
}

double psi_s(const Matrix& H, const SparsityStructure& st, double s, NormTag phi) {
  if (phi != NormTag::L1) throw Unsupported("psi_s: exact evaluation needs phi = l1");
  if (H.cols() != st.dim_e()) throw DimensionMismatch("psi_s: H must have dim(E) columns");
  double best = 0.0;
  for (Eigen::Index i = 0; i < H.rows(); ++i)
    best = std::max(best, ps_seminorm(st, H.row(i).transpose(), s));
  return best;
}

Certificate synth_certificate_group(const Matrix& A, const SparsityStructure& input, double s,
                                    NormTag phi, const SynthOptions& options) {
  if (input.kind() == StructureKind::LowRank)
    throw Unsupported("column LP: plain and group structures only (use certify_lowrank)");
  if (phi != NormTag::L1) throw Unsupported("column LP: beta is tractable only for phi = l1");
  if (A.cols() != input.dim_x()) throw DimensionMismatch("column LP: A has wrong width");
  if (s < 0) throw Error("column LP: s must be nonnegative");
  const SparsityStructure st = input.kind() == StructureKind::Plain
                                   ? SparsityStructure::singleton_groups(input.dim_x())
                                   : input;
  const RepresentationMap rep = representation_map(st);
  if (numerical_rank(rep.B) < st.dim_x())
    throw Unsupported("column LP: B must have full column rank");

  const int nE = st.dim_e();
  const int m = static_cast<int>(A.rows());
  const int K = st.num_blocks();
  const Matrix bp = group_pinv(st);
  const Matrix C = A * bp;          // m x N
  const Matrix D = rep.B * bp;      // N x N
  std::vector<double> ubar(K);
  for (int k = 0; k < K; ++k) ubar[k] = std::min(1.0, std::floor(s / st.weight(k) + 1e-12));

  LpBuilder b;
  // G = H^T (N x m), row-major variable layout.
  const int g0 = b.add_variables(nE * m, -kInf, kInf, 0.0);
  auto gvar = [&](int r, int j) { return g0 + r * m + j; };
  // Entry (r, c) of W = D - G C as (constant, linear terms).
  auto w_entry = [&](int r, int c) {
    std::vector<std::pair<int, double>> e;
    for (int j = 0; j < m; ++j)
      if (C(j, c) != 0.0) e.emplace_back(gvar(r, j), -C(j, c));
    return std::make_pair(D(r, c), e);
  };
  // Adds lhs >= |W_rc| as the two rows lhs - W_rc >= 0 and lhs + W_rc >= 0.
  auto bound_abs = [&](std::vector<std::pair<int, double>> lhs, int r, int c) {
    const auto [cst, lin] = w_entry(r, c);
    for (double sign : {1.0, -1.0}) {
      auto e = lhs;
      for (const auto& [var, coef] : lin) e.emplace_back(var, -sign * coef);
      b.add_row(e, RowSense::GreaterEqual, sign * cst);
    }
  };

  const int theta0 = b.add_variables(K);
  const int gamma_var = b.add_variable(0.0, kInf, 1.0);
  std::vector<std::vector<std::pair<int, double>>> gamma_rows(K);
  for (int l = 0; l < K; ++l) gamma_rows[l].emplace_back(theta0 + l, 2.0 * s);

  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) {
      const int xi = b.add_variable();
      if (ubar[k] > 0) gamma_rows[l].emplace_back(xi, 2.0 * ubar[k]);
      const std::vector<std::pair<int, double>> cover = {{xi, 1.0}, {theta0 + l, st.weight(k)}};
      const int rk = st.block_size(k);
      const int cl = st.block_size(l);
      const int ro = st.block_offset(k);
      const int co = st.block_offset(l);
      if (rk == 1 && cl == 1) {
        bound_abs(cover, ro, co);
        continue;
      }
      // o >= LP-representable upper bound on the induced norm of W^{kl}.
      const int o = b.add_variable();
      {
        auto e = cover;
        e.emplace_back(o, -1.0);
        b.add_row(e, RowSense::GreaterEqual, 0.0);
      }
      const NormTag from = cl == 1 ? NormTag::L1 : st.block_norm(l);
      const NormTag to = rk == 1 ? NormTag::LInf : st.block_norm(k);
      auto abs_vars = [&]() {
        Matrix idx(rk, cl);
        for (int r = 0; r < rk; ++r)
          for (int c = 0; c < cl; ++c) {
            const int a = b.add_variable();
            idx(r, c) = a;
            bound_abs({{a, 1.0}}, ro + r, co + c);
          }
        return idx;
      };
      if (to == NormTag::LInf && (from == NormTag::L1)) {
        for (int r = 0; r < rk; ++r)
          for (int c = 0; c < cl; ++c) bound_abs({{o, 1.0}}, ro + r, co + c);
      } else if (from == NormTag::L1) {
        const Matrix av = abs_vars();
        for (int c = 0; c < cl; ++c) {
          std::vector<std::pair<int, double>> e = {{o, 1.0}};
          for (int r = 0; r < rk; ++r) e.emplace_back(static_cast<int>(av(r, c)), -1.0);
          b.add_row(e, RowSense::GreaterEqual, 0.0);
        }
      } else if (to == NormTag::LInf) {
        const Matrix av = abs_vars();
        for (int r = 0; r < rk; ++r) {
          std::vector<std::pair<int, double>> e = {{o, 1.0}};
          for (int c = 0; c < cl; ++c) e.emplace_back(static_cast<int>(av(r, c)), -1.0);
          b.add_row(e, RowSense::GreaterEqual, 0.0);
        }
      } else {
        const Matrix av = abs_vars();
        std::vector<std::pair<int, double>> e = {{o, 1.0}};
        for (int r = 0; r < rk; ++r)
          for (int c = 0; c < cl; ++c) e.emplace_back(static_cast<int>(av(r, c)), -1.0);
        b.add_row(e, RowSense::GreaterEqual, 0.0);
      }
    }
  }
  for (int l = 0; l < K; ++l) {
    auto e = gamma_rows[l];
    e.emplace_back(gamma_var, -1.0);
    b.add_row(e, RowSense::LessEqual, 0.0);
  }

  // Stage two: beta >= pi_hat_s(block norms of column i of G) for every i.
  const int beta_var = b.add_variable(0.0, kInf, 0.0);
  if (options.minimize_beta) {
    for (int i = 0; i < m; ++i) {
      const int th = b.add_variable();
      std::vector<std::pair<int, double>> brow = {{th, 2.0 * s}, {beta_var, -1.0}};
      for (int l = 0; l < K; ++l) {
        const int zeta = b.add_variable();
        if (ubar[l] > 0) brow.emplace_back(zeta, 2.0 * ubar[l]);
        const std::vector<std::pair<int, double>> cover = {{zeta, 1.0}, {th, st.weight(l)}};
        const int size = st.block_size(l);
        const int off = st.block_offset(l);
        auto g_abs = [&](std::vector<std::pair<int, double>> lhs, int r) {
          for (double sign : {1.0, -1.0}) {
            auto e = lhs;
            e.emplace_back(gvar(r, i), -sign);
            b.add_row(e, RowSense::GreaterEqual, 0.0);
          }
        };
        if (size == 1) {
          g_abs(cover, off);
          continue;
        }
        const int pv = b.add_variable();
        {
          auto e = cover;
          e.emplace_back(pv, -1.0);
          b.add_row(e, RowSense::GreaterEqual, 0.0);
        }
        if (st.block_norm(l) == NormTag::LInf) {
          for (int r = 0; r < size; ++r) g_abs({{pv, 1.0}}, off + r);
        } else {  // l1 exactly, l2 bounded by l1
          std::vector<std::pair<int, double>> e = {{pv, 1.0}};
          for (int r = 0; r < size; ++r) {
            const int a = b.add_variable();
            g_abs({{a, 1.0}}, off + r);
            e.emplace_back(a, -1.0);
          }
          b.add_row(e, RowSense::GreaterEqual, 0.0);
        }
      }
      b.add_row(brow, RowSense::LessEqual, 0.0);
    }
  }

  LinearProgram lp = b.build();
  LpOptions lopt;
  lopt.rule = options.rule;
  LpSolution sol = solve_lp(lp, lopt);
  if (sol.report.status != SolveStatus::Optimal)
    throw Error("column LP: solver returned " + to_string(sol.report.status));
  auto make_cert = [&](const LpSolution& sl) {
    Matrix G(nE, m);
    for (int r = 0; r < nE; ++r)
      for (int j = 0; j < m; ++j) G(r, j) = sl.x(gvar(r, j));
    Certificate c;
    c.method = CertMethod::ColumnLP;
    c.s = s;
    c.phi = phi;
    c.H = G.transpose();
    c.W = D - G * C;
    bool exact = true;
    c.gamma = exact_gamma(st, c.W, s, exact);
    c.gamma_exact = exact;
    c.beta = psi_s(c.H, st, s, phi);
    return c;
  };
  Certificate cert = make_cert(sol);
  if (options.minimize_beta && m > 0) {
    const double slack = 1e-7;
    lp.upper(gamma_var) = sol.x(gamma_var) * (1.0 + slack);
    lp.c.setZero();
    lp.c(beta_var) = 1.0;
    const LpSolution sol2 = solve_lp(lp, lopt);
    if (sol2.report.status == SolveStatus::Optimal) {
      Certificate second = make_cert(sol2);
      if (second.gamma <= cert.gamma * (1.0 + 2.0 * slack) && second.beta <= cert.beta)
        cert = std::move(second);
    }
  }
  cert.valid = cert.gamma < 1.0;
  if (!cert.gamma_exact) cert.notes.push_back("gamma uses upper bounds on induced norms or pi_s");
  if (input.kind() == StructureKind::Plain) cert.notes.push_back("plain structure as singleton groups");
  return cert;
}

Certificate bruteforce_certificate(const Matrix& A, const SparsityStructure& st, double s,
                                   NormTag phi, double target_gamma,
                                   const BruteForceOptions& options) {
  if (st.kind() == StructureKind::LowRank || (st.kind() == StructureKind::Group && !polyhedral_group(st)))
    throw Unsupported("brute-force certificate: plain or polyhedral group structures only");
  if (phi == NormTag::L2 && A.rows() > 1)
    throw Unsupported("brute-force certificate: phi must be l1 or linf");
  const NullspaceVerdict v = gamma_s_bruteforce(A, st, s, options);
  Certificate cert;
  cert.method = CertMethod::BruteForce;
  cert.s = s;
  cert.phi = phi;
  if (v.status == Verdict::Unknown) {
    cert.gamma = kInf;
    cert.beta = kInf;
    cert.notes.push_back(v.note);
    return cert;
  }
  const double g0 = 2.0 * v.hi;
  double gamma = target_gamma;
  if (gamma < 0) gamma = g0 < 1.0 ? 0.5 * (g0 + 1.0) : g0;
  cert.gamma = gamma;
  if (gamma <= g0) {
    cert.beta = kInf;
    cert.valid = false;
    cert.notes.push_back("gamma not above twice the nullspace value: beta is unbounded");
    return cert;
  }
  const int n = st.dim_x();
  double beta = 0.0;
  bool bounded = true;
  auto run = [&](LinearProgram& lp, const Vector& obj) {
    lp.c = obj;
    const LpSolution sol = solve_lp(lp);
    if (sol.report.status == SolveStatus::Unbounded) bounded = false;
    else if (sol.report.status != SolveStatus::Optimal) throw Error("brute-force beta: LP failed");
    else beta = std::max(beta, -sol.report.objective);
  };
  if (st.kind() == StructureKind::Plain) {
    // max 2 sigma^T z_S - gamma ||z||_1 s.t. phi(Az) <= 1, z = u - v.
    LpBuilder b;
    const int u0 = b.add_variables(n);
    const int v0 = b.add_variables(n);
    const Matrix auv = (Matrix(A.rows(), 2 * n) << A, -A).finished();
    detail::add_sum_bound(b, detail::add_residual_epigraph(b, auv, Vector::Zero(A.rows()), u0, phi, 0.0), 1.0);
    LinearProgram lp = b.build();
    const int k = std::min(level(s), n);
    for_each_signed_support(n, k, [&](const std::vector<int>& idx, const Vector& sigma) {
      Vector c = Vector::Zero(lp.c.size());
      c.segment(u0, 2 * n).setConstant(gamma);
      for (int t = 0; t < k; ++t) {
        c(u0 + idx[t]) -= 2.0 * sigma(t);
        c(v0 + idx[t]) += 2.0 * sigma(t);
      }
      run(lp, c);
    });
  } else {
    LpBuilder b;
    const int z0 = b.add_variables(n, -kInf, kInf, 0.0);
    const std::vector<int> t = detail::add_norm_epigraph(b, st, z0, 0.0);
    detail::add_sum_bound(b, detail::add_residual_epigraph(b, A, Vector::Zero(A.rows()), z0, phi, 0.0), 1.0);
    LinearProgram lp = b.build();
    for_each_group_functional(st, s, kInf, [&](const Vector& f, const BlockProjector&) {
      Vector c = Vector::Zero(lp.c.size());
      c.segment(z0, n) = -2.0 * f;
      for (int var : t) c(var) = gamma;
      run(lp, c);
    });
  }
  cert.beta = bounded ? beta : kInf;
  cert.valid = bounded && gamma < 1.0;
  return cert;
}

// --- low rank ------------------------------------------------------------------

double lowrank_beta(const Matrix& H, int p, int q, int s) {
  if (H.cols() != p * q) throw DimensionMismatch("lowrank_beta: H must have pq columns");
  double best = 0.0;
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    const Matrix m = reshape(H.row(i).transpose(), p, q);
    best = std::max(best, sigma_sum(m, s) + sigma_sum(m, 2 * s));
  }
  return best;
}

Certificate certify_lowrank(const Matrix& A, const SparsityStructure& st, int s, NormTag phi,
                            const LowRankOptions& opt) {
  if (st.kind() != StructureKind::LowRank) throw Unsupported("certify_lowrank: low-rank structure only");
  const int p = st.rows();
  const int q = st.cols();
  const int n = p * q;
  if (A.cols() != n) throw DimensionMismatch("certify_lowrank: A must have pq columns");
  if (s < 0) throw Error("certify_lowrank: s must be nonnegative");
  if (phi != NormTag::L1 && !opt.allow_inexact_beta)
    throw Unsupported("certify_lowrank: exact beta needs phi = l1");

  std::vector<Matrix> candidates;
  candidates.push_back(pseudo_inverse(A).transpose());
  const Matrix ata = A.transpose() * A;
  const double denom = ata.squaredNorm();
  candidates.push_back((denom > 0 ? ata.trace() / denom : 0.0) * A);
  for (const Matrix& h : opt.extra_candidates) {
    if (h.rows() != A.rows() || h.cols() != n)
      throw DimensionMismatch("certify_lowrank: candidate H must have the shape of A");
    candidates.push_back(h);
  }
  if (opt.polish_h) {
    // Subgradient steps on H for opt_bar(I - H^T A) from the best candidate.
    Matrix h = candidates.front();
    double best_val = kInf;
    for (const Matrix& c : candidates) {
      const double v = opt_bar(Matrix::Identity(n, n) - c.transpose() * A, p, q, s);
      if (v < best_val) {
        best_val = v;
        h = c;
      }
    }
    Matrix best_h = h;
    for (int t = 1; t <= opt.polish_steps; ++t) {
      const Matrix w = Matrix::Identity(n, n) - h.transpose() * A;
      const Svd d = svd(theta(w, p, q));
      const int k1 = std::min<int>(s, static_cast<int>(d.sigma.size()));
      const int k2 = std::min<int>(2 * s, static_cast<int>(d.sigma.size()));
      const Matrix gt = d.U.leftCols(k1) * d.V.leftCols(k1).transpose() +
                        d.U.leftCols(k2) * d.V.leftCols(k2).transpose();
      const Matrix gw = theta_inverse(gt, p, q);
      const Matrix grad = -A * gw.transpose();
      const double gn = grad.norm();
      if (gn == 0.0) break;
      h -= (0.1 * std::max(1.0, h.norm()) / std::sqrt(static_cast<double>(t))) * grad / gn;
      const double v = opt_bar(Matrix::Identity(n, n) - h.transpose() * A, p, q, s);
      if (v < best_val) {
        best_val = v;
        best_h = h;
      }
    }
    candidates.push_back(best_h);
  }

  Certificate best;
  best.gamma = kInf;
  for (const Matrix& h : candidates) {
    const Matrix w = Matrix::Identity(n, n) - h.transpose() * A;
    Certificate c;
    c.s = s;
    c.phi = phi;
    c.H = h;
    c.W = w;
    c.gamma_bar = opt_bar(w, p, q, s);
    if (opt.use_opt_star) {
      const OptStarResult r = opt_star(w, p, q, s, opt.opt_star);
      c.gamma = std::min(r.value, c.gamma_bar);
      c.method = CertMethod::LowRankUStar;
    } else {
      c.gamma = c.gamma_bar;
      c.method = CertMethod::LowRankUBar;
    }
    if (c.gamma < best.gamma) best = std::move(c);
  }
  if (phi == NormTag::L1) {
    best.beta = lowrank_beta(best.H, p, q, s);
  } else {
    // Sigma_k(M) <= sqrt(k) ||M||_F and ||H^T v||_2 <= sigma_1(H) c_phi phi(v).
    const double c_phi = phi == NormTag::LInf ? std::sqrt(static_cast<double>(A.rows())) : 1.0;
    const double s1 = best.H.size() > 0 ? singular_values(best.H)(0) : 0.0;
    best.beta = (std::sqrt(static_cast<double>(s)) + std::sqrt(2.0 * s)) * s1 * c_phi;
    best.beta_exact = false;
    best.notes.push_back("beta is a Frobenius-norm upper bound (phi != l1)");
  }
  best.valid = best.gamma < 1.0;
  return best;
}

}  // namespace structrec
