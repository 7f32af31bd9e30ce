#include "oracles.hpp"
#include "structrec/linalg.hpp"
#include "structrec/norms.hpp"
#include "structrec/rng.hpp"
#include "structrec/structures.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace structrec;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

SparsityStructure overlapping_pair() {
  GroupParams g;
  g.n = 3;
  g.blocks = {{0, 1}, {1, 2}};
  g.weights = {1, 1};
  g.norms = {NormTag::L2, NormTag::L2};
  return SparsityStructure::group(g);
}

SparsityStructure mixed_group(Rng& rng, int n) {
  GroupParams g;
  g.n = n;
  std::vector<bool> covered(n, false);
  const int k = rng.uniform_int(1, 5);
  for (int l = 0; l < k; ++l) {
    g.blocks.push_back(rng.subset(n, rng.uniform_int(1, std::min(3, n))));
    for (int i : g.blocks.back()) covered[i] = true;
  }
  for (int i = 0; i < n; ++i)
    if (!covered[i]) g.blocks.push_back({i});
  for (std::size_t l = 0; l < g.blocks.size(); ++l) {
    g.weights.push_back(rng.uniform_int(1, 3));
    const int t = rng.uniform_int(0, 2);
    g.norms.push_back(t == 0 ? NormTag::L1 : t == 1 ? NormTag::L2 : NormTag::LInf);
  }
  return SparsityStructure::group(g);
}

}  // namespace

TEST(BuildStructure, PlainIsIdentity) {
  const auto [st, rep] = build_structure(SparsityStructure::plain(3));
  EXPECT_TRUE(rep.identity);
  EXPECT_TRUE(rep.B.isIdentity());
  EXPECT_EQ(st.dim_e(), 3);
}

TEST(BuildStructure, OverlappingGroupStacksSelectedCoordinates) {
  const RepresentationMap rep = representation_map(overlapping_pair());
  Matrix expect = Matrix::Zero(4, 3);
  expect(0, 0) = expect(1, 1) = expect(2, 1) = expect(3, 2) = 1.0;
  EXPECT_FALSE(rep.identity);
  EXPECT_EQ(rep.B, expect);
  EXPECT_EQ(rep.apply(vec({1, 2, 3})), vec({1, 2, 2, 3}));
}

TEST(BuildStructure, RejectsInvalidGroups) {
  GroupParams g;
  g.n = 3;
  g.blocks = {{0, 1}, {}};
  EXPECT_THROW(SparsityStructure::group(g), InvalidStructure);
  g.blocks = {{0, 1}};
  EXPECT_THROW(SparsityStructure::group(g), InvalidStructure);  // 2 uncovered
  g.blocks = {{0, 1, 2}};
  g.weights = {0.0};
  EXPECT_THROW(SparsityStructure::group(g), InvalidStructure);
  g.weights = {1.0};
  g.norms = {NormTag::Nuclear};
  EXPECT_THROW(SparsityStructure::group(g), InvalidStructure);
}

TEST(BuildStructure, LowRankTransposesWideShapes) {
  const auto st = SparsityStructure::lowrank(2, 5);
  EXPECT_EQ(st.rows(), 5);
  EXPECT_EQ(st.cols(), 2);
  EXPECT_TRUE(st.transposed());
  EXPECT_EQ(st.dim_e(), 10);
  EXPECT_TRUE(representation_map(st).identity);
}

TEST(Project, PlainExample) {
  const auto st = SparsityStructure::plain(2);
  const ProjectorDesc p = SupportProjector{{0}};
  EXPECT_EQ(project(st, p, vec({5, 7}), ProjectSide::Direct), vec({5, 0}));
  EXPECT_EQ(project(st, p, vec({5, 7}), ProjectSide::Complement), vec({0, 7}));
  EXPECT_THROW(project(st, p, vec({1, 2, 3}), ProjectSide::Direct), DimensionMismatch);
}

TEST(Project, LowRankComplementIsNotIdMinusP) {
  const auto st = SparsityStructure::lowrank(2, 2);
  const ProjectorDesc p = SubspaceProjector{Matrix::Identity(2, 1), Matrix::Identity(2, 1)};
  Matrix w(2, 2);
  w << 1, 2, 3, 4;
  const Matrix direct = reshape(project(st, p, vectorize(w), ProjectSide::Direct), 2, 2);
  const Matrix comp = reshape(project(st, p, vectorize(w), ProjectSide::Complement), 2, 2);
  Matrix d(2, 2), c(2, 2);
  d << 1, 0, 0, 0;
  c << 0, 0, 0, 4;
  EXPECT_TRUE(direct.isApprox(d));
  EXPECT_TRUE((comp - c).isZero(1e-15));
  EXPECT_FALSE((direct + comp).isApprox(w));
}

TEST(Project, IdempotentAndAnnihilatedOnRandomInputs) {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    SparsityStructure st = trial % 3 == 0   ? SparsityStructure::plain(7)
                           : trial % 3 == 1 ? mixed_group(rng, 7)
                                            : SparsityStructure::lowrank(4, 3);
    const ProjectorDesc p = random_projector(st, rng);
    const Vector w = rng.gaussian_vector(st.dim_e());
    const Vector pw = project(st, p, w, ProjectSide::Direct);
    EXPECT_LE((project(st, p, pw, ProjectSide::Direct) - pw).norm(), 1e-12 * (1 + w.norm()));
    EXPECT_LE(project(st, p, pw, ProjectSide::Complement).norm(), 1e-12 * (1 + w.norm()));
  }
}

TEST(Projector, WeightPerKind) {
  Rng rng(32);
  const auto lr = SparsityStructure::lowrank(4, 3);
  const ProjectorDesc p = SubspaceProjector{orthonormalize(rng.gaussian_matrix(4, 2)),
                                            orthonormalize(rng.gaussian_matrix(3, 1))};
  EXPECT_EQ(projector_weight(lr, p), 2.0);
  GroupParams g;
  g.n = 3;
  g.blocks = {{0}, {1, 2}};
  g.weights = {1.5, 2.0};
  EXPECT_EQ(projector_weight(SparsityStructure::group(g), BlockProjector{{0, 1}}), 3.5);
  EXPECT_EQ(projector_weight(SparsityStructure::plain(4), SupportProjector{{0, 3}}), 2.0);
}

TEST(EnumerateProjectors, Examples) {
  const auto plain = enumerate_projectors(SparsityStructure::plain(3), 1);
  ASSERT_TRUE(plain);
  ASSERT_EQ(plain->size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(std::get<SupportProjector>((*plain)[i]).support, std::vector<int>{i});

  GroupParams g;
  g.n = 2;
  g.blocks = {{0}, {1}};
  g.weights = {1, 2};
  const auto grp = enumerate_projectors(SparsityStructure::group(g), 2);
  ASSERT_TRUE(grp);
  std::set<std::vector<int>> got;
  for (const auto& p : *grp) got.insert(std::get<BlockProjector>(p).blocks);
  EXPECT_EQ(got, (std::set<std::vector<int>>{{0}, {1}}));

  EXPECT_FALSE(enumerate_projectors(SparsityStructure::lowrank(2, 2), 1));
}

TEST(EnumerateProjectors, GroupSetsAreExactlyTheMaximalFeasibleOnes) {
  Rng rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const auto st = mixed_group(rng, 6);
    const int k = st.num_blocks();
    const double s = rng.uniform(0.0, 6.0);
    std::set<std::vector<int>> expect;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      double w = 0;
      for (int l = 0; l < k; ++l)
        if ((mask >> l) & 1u) w += st.weight(l);
      if (w > s + 1e-12) continue;
      bool maximal = true;
      for (int l = 0; l < k && maximal; ++l)
        if (!((mask >> l) & 1u) && w + st.weight(l) <= s + 1e-12) maximal = false;
      if (!maximal) continue;
      std::vector<int> set;
      for (int l = 0; l < k; ++l)
        if ((mask >> l) & 1u) set.push_back(l);
      expect.insert(set);
    }
    const auto sets = enumerate_projectors(st, s);
    ASSERT_TRUE(sets);
    std::set<std::vector<int>> got;
    for (const auto& p : *sets) got.insert(std::get<BlockProjector>(p).blocks);
    EXPECT_EQ(got, expect);
  }
}

TEST(BestSparseApprox, Examples) {
  const auto r = best_sparse_approx(SparsityStructure::plain(3), vec({3, -1, 2}), 2);
  EXPECT_EQ(std::get<SupportProjector>(r.projector).support, (std::vector<int>{0, 2}));
  EXPECT_DOUBLE_EQ(r.delta_x, 1.0);
  const Vector d = vectorize(vec({3, 2}).asDiagonal().toDenseMatrix());
  EXPECT_NEAR(best_sparse_approx(SparsityStructure::lowrank(2, 2), d, 1).delta_x, 2.0, 1e-12);
}

TEST(BestSparseApprox, FullWeightGivesZero) {
  Rng rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    SparsityStructure st = trial % 3 == 0   ? SparsityStructure::plain(6)
                           : trial % 3 == 1 ? mixed_group(rng, 6)
                                            : SparsityStructure::lowrank(3, 2);
    const Vector w = rng.gaussian_vector(st.dim_e());
    EXPECT_EQ(best_sparse_approx(st, w, st.full_weight()).delta_x, 0.0);
  }
}

TEST(BestSparseApprox, PlainMatchesExhaustiveSupports) {
  Rng rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(1, 12);
    const int s = rng.uniform_int(0, n);
    Vector w = rng.gaussian_vector(n);
    if (trial % 4 == 0) w = w.array().round();
    double best = kInf;
    oracle::for_each_subset(n, s, [&](const std::vector<int>& idx) {
      double rest = w.lpNorm<1>();
      for (int i : idx) rest -= std::abs(w(i));
      best = std::min(best, rest);
    });
    const SparseApprox r = best_sparse_approx(SparsityStructure::plain(n), w, s);
    EXPECT_NEAR(r.delta_x, best, 1e-12);
    EXPECT_TRUE(r.exact);
  }
}

TEST(BestSparseApprox, GroupMatchesExhaustiveBlockSets) {
  Rng rng(36);
  for (int trial = 0; trial < 60; ++trial) {
    const auto st = mixed_group(rng, 7);
    const Vector w = rng.gaussian_vector(st.dim_e());
    const double s = rng.uniform_int(0, 5);
    const Vector bn = st.block_norms(w);
    const double keep = oracle::pi_s(bn, st.weights(), s) / 2.0;
    const SparseApprox r = best_sparse_approx(st, w, s);
    EXPECT_NEAR(r.delta_x, bn.sum() - keep, 1e-9);
    EXPECT_LE(projector_weight(st, r.projector), s + 1e-12);
  }
}

TEST(BestSparseApprox, LowRankIsTruncatedSvd) {
  Rng rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector w = rng.gaussian_vector(12);
    const Vector sv = singular_values(reshape(w, 4, 3));
    const int s = rng.uniform_int(0, 3);
    EXPECT_NEAR(best_sparse_approx(SparsityStructure::lowrank(4, 3), w, s).delta_x, sv.tail(3 - s).sum(),
                1e-9);
  }
}

TEST(Axioms, HoldForAllStructures) {
  Rng rng(38);
  for (const auto& st : {SparsityStructure::plain(5), SparsityStructure::lowrank(3, 2),
                         SparsityStructure::lowrank(2, 3), overlapping_pair(), mixed_group(rng, 6)}) {
    const AxiomReport r = verify_axioms(st, 1000, 7);
    EXPECT_TRUE(r.ok());
    EXPECT_GE(r.dual_contraction.worst_margin, -1e-9);
    EXPECT_EQ(r.trials, 1000);
  }
}

TEST(Axioms, CorruptedComplementIsReported) {
  AxiomOptions opt;
  opt.complement_override = [](const ProjectorDesc&, const Vector& w) { return w; };
  const AxiomReport r = verify_axioms(SparsityStructure::plain(5), 200, 3, opt);
  EXPECT_FALSE(r.ok());
  EXPECT_GT(r.annihilates.violations, 0);
  ASSERT_TRUE(r.annihilates.witness);
}

TEST(NullspaceInequality, HoldsForAllStructures) {
  Rng rng(39);
  for (const auto& st : {SparsityStructure::plain(6), SparsityStructure::lowrank(3, 3), overlapping_pair(),
                         mixed_group(rng, 6)}) {
    const AxiomCheck c = verify_nullspace_inequality(st, 1000, 5);
    EXPECT_EQ(c.violations, 0);
    EXPECT_GE(c.worst_margin, -1e-9);
  }
}

TEST(RandomProjector, RespectsWeightCap) {
  Rng rng(40);
  for (int trial = 0; trial < 100; ++trial) {
    SparsityStructure st = trial % 3 == 0   ? SparsityStructure::plain(6)
                           : trial % 3 == 1 ? mixed_group(rng, 6)
                                            : SparsityStructure::lowrank(3, 3);
    const double cap = rng.uniform_int(1, 3);
    EXPECT_LE(projector_weight(st, random_projector(st, rng, cap)), cap + 1e-12);
  }
}
