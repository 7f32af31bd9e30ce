#include "structrec/structures.hpp"

#include "structrec/knapsack.hpp"
#include "structrec/linalg.hpp"
#include "structrec/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace structrec {

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Plain: return "plain";
    case StructureKind::Group: return "group";
    case StructureKind::LowRank: return "lowrank";
  }
  return "?";
}

SparsityStructure SparsityStructure::plain(int n) {
  if (n <= 0) throw InvalidStructure("plain: n must be positive");
  SparsityStructure s;
  s.kind_ = StructureKind::Plain;
  s.dim_x_ = s.dim_e_ = n;
  return s;
}

SparsityStructure SparsityStructure::group(GroupParams params) {
  if (params.n <= 0) throw InvalidStructure("group: n must be positive");
  const std::size_t k = params.blocks.size();
  if (k == 0) throw InvalidStructure("group: at least one block is required");
  if (params.weights.empty()) params.weights.assign(k, 1.0);
  if (params.norms.empty()) params.norms.assign(k, NormTag::L2);
  if (params.norms.size() == 1 && k > 1) params.norms.assign(k, params.norms.front());
  if (params.weights.size() != k || params.norms.size() != k)
    throw InvalidStructure("group: weights and norms must have one entry per block");

  std::vector<bool> covered(params.n, false);
  SparsityStructure s;
  s.kind_ = StructureKind::Group;
  s.dim_x_ = params.n;
  int offset = 0;
  for (std::size_t l = 0; l < k; ++l) {
    const auto& blk = params.blocks[l];
    if (blk.empty()) throw InvalidStructure("group: block " + std::to_string(l) + " is empty");
    std::set<int> seen;
    for (int i : blk) {
      if (i < 0 || i >= params.n)
        throw InvalidStructure("group: index " + std::to_string(i) + " out of range");
      if (!seen.insert(i).second)
        throw InvalidStructure("group: duplicate index in block " + std::to_string(l));
      covered[i] = true;
    }
    if (!(params.weights[l] > 0) || !std::isfinite(params.weights[l]))
      throw InvalidStructure("group: weights must be positive");
    if (!is_vector_norm(params.norms[l]))
      throw InvalidStructure("group: block norms must be l1, l2 or linf");
    s.offsets_.push_back(offset);
    offset += static_cast<int>(blk.size());
  }
  if (!std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }))
    throw InvalidStructure("group: blocks must cover every coordinate");
  s.dim_e_ = offset;
  s.blocks_ = std::move(params.blocks);
  s.weights_ = std::move(params.weights);
  s.norms_ = std::move(params.norms);
  return s;
}

SparsityStructure SparsityStructure::lowrank(int p, int q) {
  if (p <= 0 || q <= 0) throw InvalidStructure("lowrank: p and q must be positive");
  SparsityStructure s;
  s.kind_ = StructureKind::LowRank;
  s.transposed_ = p < q;
  s.p_ = std::max(p, q);
  s.q_ = std::min(p, q);
  s.dim_x_ = s.dim_e_ = p * q;
  return s;
}

SparsityStructure SparsityStructure::singleton_groups(int n) {
  GroupParams g;
  g.n = n;
  for (int i = 0; i < n; ++i) g.blocks.push_back({i});
  g.weights.assign(n, 1.0);
  g.norms.assign(n, NormTag::L1);
  return group(std::move(g));
}

bool SparsityStructure::integer_weights() const { return all_integer(weights_); }

double SparsityStructure::full_weight() const {
  switch (kind_) {
    case StructureKind::Plain: return dim_x_;
    case StructureKind::Group: return std::accumulate(weights_.begin(), weights_.end(), 0.0);
    case StructureKind::LowRank: return q_;
  }
  return 0.0;
}

Vector SparsityStructure::block_norms(const Vector& w) const {
  check_e(w);
  if (kind_ == StructureKind::Plain) return w.cwiseAbs();
  if (kind_ != StructureKind::Group) throw Unsupported("block_norms: not a block structure");
  Vector out(num_blocks());
  for (int l = 0; l < num_blocks(); ++l)
    out(l) = vector_norm(w.segment(offsets_[l], block_size(l)), norms_[l]);
  return out;
}

void SparsityStructure::check_e(const Vector& w) const {
  if (w.size() != dim_e_)
    throw DimensionMismatch("expected an E-vector of length " + std::to_string(dim_e_) +
                            ", got " + std::to_string(w.size()));
}

void SparsityStructure::check_x(const Vector& x) const {
  if (x.size() != dim_x_)
    throw DimensionMismatch("expected an X-vector of length " + std::to_string(dim_x_) +
                            ", got " + std::to_string(x.size()));
}

RepresentationMap representation_map(const SparsityStructure& st) {
  RepresentationMap map;
  if (st.kind() != StructureKind::Group) {
    map.B = Matrix::Identity(st.dim_e(), st.dim_x());
    map.identity = true;
    return map;
  }
  map.B = Matrix::Zero(st.dim_e(), st.dim_x());
  for (int l = 0; l < st.num_blocks(); ++l)
    for (int t = 0; t < st.block_size(l); ++t) map.B(st.block_offset(l) + t, st.block(l)[t]) = 1.0;
  map.identity = map.B.rows() == map.B.cols() && map.B.isIdentity(0.0);
  return map;
}

std::pair<SparsityStructure, RepresentationMap> build_structure(const SparsityStructure& s) {
  return {s, representation_map(s)};
}

// Projectors ---------------------------------------------------------------

double projector_weight(const SparsityStructure& st, const ProjectorDesc& p) {
  if (const auto* sp = std::get_if<SupportProjector>(&p)) return static_cast<double>(sp->support.size());
  if (const auto* bp = std::get_if<BlockProjector>(&p)) {
    double acc = 0.0;
    for (int l : bp->blocks) acc += st.weight(l);
    return acc;
  }
  const auto& lr = std::get<SubspaceProjector>(p);
  return static_cast<double>(std::max(lr.left.cols(), lr.right.cols()));
}

Vector project(const SparsityStructure& st, const ProjectorDesc& p, const Vector& w,
               ProjectSide side) {
  st.check_e(w);
  const bool direct = side == ProjectSide::Direct;
  if (const auto* sp = std::get_if<SupportProjector>(&p)) {
    if (st.kind() != StructureKind::Plain) throw Error("support projector needs a plain structure");
    Vector kept = Vector::Zero(w.size());
    for (int i : sp->support) kept(i) = w(i);
    return direct ? kept : Vector(w - kept);
  }
  if (const auto* bp = std::get_if<BlockProjector>(&p)) {
    if (st.kind() != StructureKind::Group) throw Error("block projector needs a group structure");
    Vector kept = Vector::Zero(w.size());
    for (int l : bp->blocks)
      kept.segment(st.block_offset(l), st.block_size(l)) =
          w.segment(st.block_offset(l), st.block_size(l));
    return direct ? kept : Vector(w - kept);
  }
  if (st.kind() != StructureKind::LowRank) throw Error("subspace projector needs a low-rank structure");
  const auto& lr = std::get<SubspaceProjector>(p);
  const Matrix x = reshape(w, st.rows(), st.cols());
  const Matrix pl = lr.left * lr.left.transpose();
  const Matrix pr = lr.right * lr.right.transpose();
  if (direct) return vectorize(pl * x * pr);
  const Matrix il = Matrix::Identity(st.rows(), st.rows()) - pl;
  const Matrix ir = Matrix::Identity(st.cols(), st.cols()) - pr;
  return vectorize(il * x * ir);
}

namespace {

void combinations(int n, int k, int start, std::vector<int>& cur,
                  std::vector<ProjectorDesc>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.emplace_back(SupportProjector{cur});
    return;
  }
  for (int i = start; i <= n - (k - static_cast<int>(cur.size())); ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

void feasible_block_sets(const SparsityStructure& st, double s, int l, double used,
                         std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (l == st.num_blocks()) {
    out.push_back(cur);
    return;
  }
  if (used + st.weight(l) <= s + 1e-12) {
    cur.push_back(l);
    feasible_block_sets(st, s, l + 1, used + st.weight(l), cur, out);
    cur.pop_back();
  }
  feasible_block_sets(st, s, l + 1, used, cur, out);
}

}  // namespace

std::optional<std::vector<ProjectorDesc>> enumerate_projectors(const SparsityStructure& st,
                                                               double s) {
  if (s < 0) throw Error("enumerate_projectors: s must be nonnegative");
  std::vector<ProjectorDesc> out;
  switch (st.kind()) {
    case StructureKind::Plain: {
      const int k = std::min(static_cast<int>(std::floor(s + 1e-12)), st.dim_x());
      std::vector<int> cur;
      combinations(st.dim_x(), k, 0, cur, out);
      return out;
    }
    case StructureKind::Group: {
      std::vector<std::vector<int>> sets;
      std::vector<int> cur;
      feasible_block_sets(st, s, 0, 0.0, cur, sets);
      for (const auto& set : sets) {
        double used = 0.0;
        std::vector<bool> in(st.num_blocks(), false);
        for (int l : set) {
          used += st.weight(l);
          in[l] = true;
        }
        bool maximal = true;
        for (int l = 0; l < st.num_blocks() && maximal; ++l)
          if (!in[l] && used + st.weight(l) <= s + 1e-12) maximal = false;
        if (maximal) out.emplace_back(BlockProjector{set});
      }
      return out;
    }
    case StructureKind::LowRank:
      return std::nullopt;
  }
  return out;
}

SparseApprox best_sparse_approx(const SparsityStructure& st, const Vector& w, double s) {
  st.check_e(w);
  if (s < 0) throw Error("best_sparse_approx: s must be nonnegative");
  SparseApprox out;
  switch (st.kind()) {
    case StructureKind::Plain: {
      const int n = st.dim_x();
      const int k = std::min(static_cast<int>(std::floor(s + 1e-12)), n);
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return std::abs(w(a)) > std::abs(w(b)); });
      std::vector<int> support(order.begin(), order.begin() + k);
      std::sort(support.begin(), support.end());
      std::vector<bool> kept(n, false);
      for (int i : support) kept[i] = true;
      double dropped = 0.0;
      for (int i = 0; i < n; ++i)
        if (!kept[i]) dropped += std::abs(w(i));
      out.projector = SupportProjector{support};
      out.delta_x = dropped;
      return out;
    }
    case StructureKind::Group: {
      const Vector norms = st.block_norms(w);
      std::vector<double> values(norms.data(), norms.data() + norms.size());
      const KnapsackResult kr = knapsack_max(values, st.weights(), s, KnapsackMethod::Auto);
      std::vector<bool> in(st.num_blocks(), false);
      for (int l : kr.chosen) in[l] = true;
      double dropped = 0.0;
      for (int l = 0; l < st.num_blocks(); ++l)
        if (!in[l]) dropped += norms(l);
      out.projector = BlockProjector{kr.chosen};
      out.delta_x = dropped;
      out.exact = kr.exact;
      return out;
    }
    case StructureKind::LowRank: {
      const int k = std::min(static_cast<int>(std::floor(s + 1e-12)), st.cols());
      const Svd d = svd(reshape(w, st.rows(), st.cols()));
      out.projector = SubspaceProjector{d.U.leftCols(k), d.V.leftCols(k)};
      double dropped = 0.0;
      for (Eigen::Index i = k; i < d.sigma.size(); ++i) dropped += d.sigma(i);
      out.delta_x = dropped;
      return out;
    }
  }
  return out;
}

ProjectorDesc random_projector(const SparsityStructure& st, Rng& rng, double max_weight) {
  switch (st.kind()) {
    case StructureKind::Plain: {
      int cap = st.dim_x();
      if (max_weight >= 0) cap = std::min(cap, static_cast<int>(std::floor(max_weight + 1e-12)));
      return SupportProjector{rng.subset(st.dim_x(), rng.uniform_int(0, cap))};
    }
    case StructureKind::Group: {
      std::vector<int> order = rng.subset(st.num_blocks(), st.num_blocks());
      std::shuffle(order.begin(), order.end(), rng.engine());
      const int take = rng.uniform_int(0, st.num_blocks());
      std::vector<int> chosen;
      double used = 0.0;
      for (int t = 0; t < take; ++t) {
        const int l = order[t];
        if (max_weight >= 0 && used + st.weight(l) > max_weight + 1e-12) continue;
        chosen.push_back(l);
        used += st.weight(l);
      }
      std::sort(chosen.begin(), chosen.end());
      return BlockProjector{chosen};
    }
    case StructureKind::LowRank: {
      int cap_l = st.rows();
      int cap_r = st.cols();
      if (max_weight >= 0) {
        const int k = static_cast<int>(std::floor(max_weight + 1e-12));
        cap_l = std::min(cap_l, k);
        cap_r = std::min(cap_r, k);
      }
      const int rl = rng.uniform_int(0, cap_l);
      const int rr = rng.uniform_int(0, cap_r);
      return SubspaceProjector{orthonormalize(rng.gaussian_matrix(st.rows(), rl)),
                               orthonormalize(rng.gaussian_matrix(st.cols(), rr))};
    }
  }
  return SupportProjector{};
}

// Axiom verification -------------------------------------------------------

namespace {

void record(AxiomCheck& check, double margin, double tol, const ProjectorDesc& p, const Vector& f,
            const Vector& g) {
  check.worst_margin = std::min(check.worst_margin, margin);
  if (margin < -tol) {
    ++check.violations;
    if (!check.witness) check.witness = AxiomWitness{p, f, g};
  }
}

}  // namespace

AxiomReport verify_axioms(const SparsityStructure& st, int trials, std::uint64_t seed,
                          const AxiomOptions& options) {
  if (trials < 1) throw Error("verify_axioms: trials must be >= 1");
  AxiomReport report;
  report.trials = trials;
  Rng rng(seed);
  auto complement = [&](const ProjectorDesc& p, const Vector& v) {
    return options.complement_override ? options.complement_override(p, v)
                                       : project(st, p, v, ProjectSide::Complement);
  };
  const int n = st.dim_e();
  for (int t = 0; t < trials; ++t) {
    const ProjectorDesc p = random_projector(st, rng);
    const Vector w = rng.gaussian_vector(n);
    Vector f = rng.gaussian_vector(n);
    Vector g = rng.gaussian_vector(n);
    // Unequal dual norms exercise both sides of the max.
    g *= rng.uniform(0.25, 4.0);

    const Vector pw = project(st, p, w, ProjectSide::Direct);
    const Vector ppw = project(st, p, pw, ProjectSide::Direct);
    const double scale = 1.0 + w.norm();
    record(report.idempotent, -(ppw - pw).lpNorm<Eigen::Infinity>() / scale, options.tol, p, w, w);
    record(report.annihilates, -complement(p, pw).lpNorm<Eigen::Infinity>() / scale, options.tol,
           p, w, w);

    // Every projector and complement here is self-adjoint.
    const Vector mixed = project(st, p, f, ProjectSide::Direct) + complement(p, g);
    const double rhs = std::max(structure_norm(st, f, true), structure_norm(st, g, true));
    const double lhs = structure_norm(st, mixed, true);
    record(report.dual_contraction, (rhs - lhs) / std::max(1.0, rhs), options.tol, p, f, g);
  }
  return report;
}

AxiomCheck verify_nullspace_inequality(const SparsityStructure& st, int trials, std::uint64_t seed,
                                       double tol) {
  AxiomCheck check;
  Rng rng(seed);
  const RepresentationMap rep = representation_map(st);
  for (int t = 0; t < trials; ++t) {
    const ProjectorDesc p = random_projector(st, rng);
    const Vector w = project(st, p, rng.gaussian_vector(st.dim_e()), ProjectSide::Direct);
    Vector z = rng.gaussian_vector(st.dim_x()) * rng.uniform(0.1, 10.0);
    const Vector bz = rep.apply(z);
    const double lhs = structure_norm(st, w + bz);
    const double rhs = structure_norm(st, w) +
                       structure_norm(st, project(st, p, bz, ProjectSide::Complement)) -
                       structure_norm(st, project(st, p, bz, ProjectSide::Direct));
    const double margin = (lhs - rhs) / std::max(1.0, std::abs(lhs));
    record(check, margin, tol, p, w, z);
  }
  return check;
}

}  // namespace structrec
