#include "oracles.hpp"
#include "structrec/knapsack.hpp"
#include "structrec/linalg.hpp"
#include "structrec/norms.hpp"
#include "structrec/rng.hpp"
#include "structrec/structures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace structrec;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

SparsityStructure l2_pair_group() {
  GroupParams g;
  g.n = 3;
  g.blocks = {{0, 1}, {2}};
  g.norms = {NormTag::L2, NormTag::L2};
  return SparsityStructure::group(g);
}

// Random group structure with overlapping blocks and mixed norms.
SparsityStructure random_group(Rng& rng, int n, int k, bool integer_weights) {
  GroupParams g;
  g.n = n;
  std::vector<bool> covered(n, false);
  for (int l = 0; l < k; ++l) {
    const int size = rng.uniform_int(1, std::min(3, n));
    g.blocks.push_back(rng.subset(n, size));
    for (int i : g.blocks.back()) covered[i] = true;
  }
  for (int i = 0; i < n; ++i)
    if (!covered[i]) g.blocks.push_back({i});
  for (std::size_t l = 0; l < g.blocks.size(); ++l) {
    g.weights.push_back(integer_weights ? rng.uniform_int(1, 3) : rng.uniform(0.5, 2.5));
    const int t = rng.uniform_int(0, 2);
    g.norms.push_back(t == 0 ? NormTag::L1 : t == 1 ? NormTag::L2 : NormTag::LInf);
  }
  return SparsityStructure::group(g);
}

// Sign vectors of length n.
std::vector<Vector> sign_vectors(int n) {
  std::vector<Vector> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Vector v(n);
    for (int j = 0; j < n; ++j) v(j) = (mask >> j) & 1u ? -1.0 : 1.0;
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST(SumTop, Examples) {
  EXPECT_DOUBLE_EQ(sum_top(vec({1, -4, 2}), 2), 6.0);
  EXPECT_DOUBLE_EQ(sum_top(Vector::Zero(3), 2), 0.0);
  EXPECT_DOUBLE_EQ(sum_top(vec({1, -4, 2}), 3), 7.0);
  EXPECT_DOUBLE_EQ(sum_top(vec({1, -4, 2}), 5), 7.0);
}

TEST(SumTop, MatchesSubsetEnumeration) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = rng.uniform_int(1, 12);
    const int s = rng.uniform_int(1, n);
    Vector x = rng.gaussian_vector(n);
    if (trial % 3 == 0) x = x.array().round();  // ties
    EXPECT_EQ(sum_top(x, s), oracle::sum_top(x, s));
  }
}

TEST(PiS, Examples) {
  EXPECT_DOUBLE_EQ(pi_s(vec({3, 1, 2}), {1, 1, 1}, 2, PiVariant::Exact), 10.0);
  EXPECT_DOUBLE_EQ(pi_s(vec({1, 5}), {1, 2}, 2, PiVariant::Exact), 10.0);
  EXPECT_DOUBLE_EQ(pi_s(Vector::Zero(2), {1, 2}, 2, PiVariant::Exact), 0.0);
  EXPECT_DOUBLE_EQ(pi_s(Vector::Zero(2), {1, 2}, 2, PiVariant::Hat), 0.0);
}

TEST(PiS, ExactMatchesEnumerationAndHatDominates) {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = rng.uniform_int(1, 12);
    Vector u = rng.gaussian_vector(k).cwiseAbs();
    std::vector<double> chi(k);
    const bool integer = trial % 2 == 0;
    for (double& c : chi) c = integer ? rng.uniform_int(1, 4) : rng.uniform(0.3, 3.0);
    const double s = integer ? rng.uniform_int(0, 8) : rng.uniform(0.0, 6.0);
    const double exact = pi_s(u, chi, s, PiVariant::Exact);
    EXPECT_NEAR(exact, oracle::pi_s(u, chi, s), 1e-12 * (1 + exact));
    EXPECT_GE(pi_s(u, chi, s, PiVariant::Hat), exact - 1e-12);
  }
}

TEST(PiS, HatEqualsExactForUnitWeights) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = rng.uniform_int(1, 10);
    const Vector u = rng.gaussian_vector(k).cwiseAbs();
    const std::vector<double> chi(k, 1.0);
    const double s = rng.uniform_int(0, k + 1);
    EXPECT_NEAR(pi_s(u, chi, s, PiVariant::Hat), pi_s(u, chi, s, PiVariant::Exact), 1e-12);
  }
}

TEST(PiS, ExactRejectsLargeNonIntegerInstances) {
  std::vector<double> chi(30, 1.5);
  EXPECT_THROW(pi_s(Vector::Ones(30), chi, 4.0, PiVariant::Exact), Unsupported);
  EXPECT_NO_THROW(pi_s(Vector::Ones(30), chi, 4.0, PiVariant::Hat));
}

TEST(Knapsack, MatchesSubsetEnumeration) {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = rng.uniform_int(1, 12);
    std::vector<double> values(k), weights(k);
    for (int l = 0; l < k; ++l) {
      values[l] = rng.uniform(0.0, 3.0);
      weights[l] = trial % 2 ? rng.uniform_int(1, 4) : rng.uniform(0.2, 3.0);
    }
    const double cap = rng.uniform(0.0, 8.0);
    double best = 0.0;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      double w = 0.0, v = 0.0;
      for (int l = 0; l < k; ++l)
        if ((mask >> l) & 1u) {
          w += weights[l];
          v += values[l];
        }
      if (w <= cap + 1e-12) best = std::max(best, v);
    }
    const KnapsackResult r = knapsack_max(values, weights, cap, KnapsackMethod::Exact);
    EXPECT_NEAR(r.value, best, 1e-12);
    EXPECT_TRUE(r.exact);
    double w = 0.0, v = 0.0;
    for (int l : r.chosen) {
      w += weights[l];
      v += values[l];
    }
    EXPECT_LE(w, cap + 1e-9);
    EXPECT_NEAR(v, r.value, 1e-12);
  }
}

TEST(SigmaSum, Examples) {
  const Matrix d = vec({3, 2, 1}).asDiagonal();
  EXPECT_NEAR(sigma_sum(d, 2), 5.0, 1e-12);
  EXPECT_NEAR(sigma_sum(d, 3), 6.0, 1e-12);
  EXPECT_NEAR(sigma_sum(Matrix::Zero(3, 3), 2), 0.0, 1e-12);
}

TEST(SigmaSum, AgreesWithVariationalFormOnRankOneTests) {
  // Sigma_k(z) >= Tr(U^T z V) for any orthonormal U (p x k), V (q x k).
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix z = rng.gaussian_matrix(4, 3);
    const int k = rng.uniform_int(1, 3);
    const Matrix u = orthonormalize(rng.gaussian_matrix(4, k));
    const Matrix v = orthonormalize(rng.gaussian_matrix(3, k));
    EXPECT_GE(sigma_sum(z, k) + 1e-12, (u.transpose() * z * v).trace());
  }
}

TEST(StructureNorm, Examples) {
  const auto plain = SparsityStructure::plain(2);
  EXPECT_DOUBLE_EQ(structure_norm(plain, vec({1, -2})), 3.0);
  EXPECT_DOUBLE_EQ(structure_norm(plain, vec({1, -2}), true), 2.0);
  EXPECT_DOUBLE_EQ(structure_norm(l2_pair_group(), vec({3, 4, 0})), 5.0);
  const auto lr = SparsityStructure::lowrank(2, 2);
  const Vector d = vectorize(vec({3, 2}).asDiagonal().toDenseMatrix());
  EXPECT_NEAR(structure_norm(lr, d), 5.0, 1e-12);
  EXPECT_NEAR(structure_norm(lr, d, true), 3.0, 1e-12);
}

TEST(StructureNorm, HolderHomogeneityTriangle) {
  Rng rng(16);
  for (int trial = 0; trial < 60; ++trial) {
    SparsityStructure st = trial % 3 == 0   ? SparsityStructure::plain(6)
                           : trial % 3 == 1 ? random_group(rng, 6, 3, true)
                                            : SparsityStructure::lowrank(3, 2);
    const int e = st.dim_e();
    const Vector w = rng.gaussian_vector(e);
    const Vector v = rng.gaussian_vector(e);
    const Vector f = rng.gaussian_vector(e);
    const double c = rng.uniform(-3.0, 3.0);
    for (bool dual : {false, true}) {
      const double nw = structure_norm(st, w, dual);
      EXPECT_NEAR(structure_norm(st, c * w, dual), std::abs(c) * nw, 1e-9 * (1 + nw));
      EXPECT_LE(structure_norm(st, w + v, dual), nw + structure_norm(st, v, dual) + 1e-9);
    }
    EXPECT_LE(f.dot(w), structure_norm(st, f, true) * structure_norm(st, w) + 1e-9);
    // Sampled duality sanity: the norm is attained by some dual-unit f.
    double best = 0.0;
    for (int k = 0; k < 200; ++k) {
      const Vector g = rng.gaussian_vector(e);
      best = std::max(best, g.dot(w) / structure_norm(st, g, true));
    }
    EXPECT_LE(best, structure_norm(st, w) + 1e-9);
  }
}

TEST(PsSeminorm, Examples) {
  EXPECT_DOUBLE_EQ(ps_seminorm(SparsityStructure::plain(3), vec({3, 1, 2}), 2), 10.0);
  const Vector d = vectorize(vec({3, 2, 1}).asDiagonal().toDenseMatrix());
  EXPECT_NEAR(ps_seminorm(SparsityStructure::lowrank(3, 3), d, 1), 8.0, 1e-12);
  EXPECT_DOUBLE_EQ(ps_seminorm(SparsityStructure::plain(3), Vector::Zero(3), 2), 0.0);
}

TEST(PsSeminorm, MatchesEnumeration) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(1, 12);
    const Vector z = rng.gaussian_vector(n);
    const int s = rng.uniform_int(1, n);
    EXPECT_EQ(ps_seminorm(SparsityStructure::plain(n), z, s), 2.0 * oracle::sum_top(z, s));
    const auto g = random_group(rng, n, rng.uniform_int(1, 6), true);
    const Vector zg = rng.gaussian_vector(g.dim_e());
    const Vector bn = g.block_norms(zg);
    EXPECT_NEAR(ps_seminorm(g, zg, s), oracle::pi_s(bn, g.weights(), s), 1e-12);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const auto lr = SparsityStructure::lowrank(4, 3);
    const Vector z = rng.gaussian_vector(12);
    const Vector sv = singular_values(reshape(z, 4, 3));
    EXPECT_NEAR(ps_seminorm(lr, z, 1), sv(0) + sv(0) + sv(1), 1e-9);
  }
}

TEST(InducedNorm, Examples) {
  Matrix q1(1, 2);
  q1 << 3, 4;
  auto r = induced_norm(q1, NormTag::L2, NormTag::L2);
  EXPECT_NEAR(r.value, 5.0, 1e-12);
  EXPECT_TRUE(r.exact);
  Matrix q2(2, 2);
  q2 << 1, -2, 0, 3;
  r = induced_norm(q2, NormTag::L1, NormTag::L1);
  EXPECT_NEAR(r.value, 5.0, 1e-12);
  EXPECT_TRUE(r.exact);
  const Matrix c = Matrix::Constant(1, 1, -2.5);
  for (NormTag from : {NormTag::L1, NormTag::L2, NormTag::LInf})
    for (NormTag to : {NormTag::L1, NormTag::L2, NormTag::LInf}) {
      r = induced_norm(c, from, to);
      EXPECT_NEAR(r.value, 2.5, 1e-12);
      EXPECT_TRUE(r.exact);
    }
}

TEST(InducedNorm, MatchesExtremePointOracles) {
  Rng rng(18);
  for (int trial = 0; trial < 80; ++trial) {
    const int rows = rng.uniform_int(1, 5);
    const int cols = rng.uniform_int(1, 5);
    const Matrix q = rng.gaussian_matrix(rows, cols);
    const auto cs = sign_vectors(cols);
    const auto rs = sign_vectors(rows);
    // from linf: the extreme points of the unit ball are sign vectors.
    double inf_l1 = 0, inf_l2 = 0, inf_inf = 0;
    for (const Vector& x : cs) {
      inf_l1 = std::max(inf_l1, (q * x).lpNorm<1>());
      inf_l2 = std::max(inf_l2, (q * x).norm());
      inf_inf = std::max(inf_inf, (q * x).lpNorm<Eigen::Infinity>());
    }
    // l2 -> l1 by duality: max over sign vectors of ||Q^T sigma||_2.
    double l2_l1 = 0;
    for (const Vector& sgn : rs) l2_l1 = std::max(l2_l1, (q.transpose() * sgn).norm());
    // from l1: columns.
    double l1_l1 = 0, l1_l2 = 0, l1_inf = 0;
    for (int j = 0; j < cols; ++j) {
      l1_l1 = std::max(l1_l1, q.col(j).lpNorm<1>());
      l1_l2 = std::max(l1_l2, q.col(j).norm());
      l1_inf = std::max(l1_inf, q.col(j).lpNorm<Eigen::Infinity>());
    }
    double l2_inf = 0;
    for (int i = 0; i < rows; ++i) l2_inf = std::max(l2_inf, q.row(i).norm());
    const double l2_l2 = singular_values(q)(0);
    struct Case {
      NormTag from, to;
      double expect;
    };
    for (const Case& c : {Case{NormTag::LInf, NormTag::L1, inf_l1}, Case{NormTag::LInf, NormTag::L2, inf_l2},
                          Case{NormTag::LInf, NormTag::LInf, inf_inf}, Case{NormTag::L2, NormTag::L1, l2_l1},
                          Case{NormTag::L1, NormTag::L1, l1_l1}, Case{NormTag::L1, NormTag::L2, l1_l2},
                          Case{NormTag::L1, NormTag::LInf, l1_inf}, Case{NormTag::L2, NormTag::LInf, l2_inf},
                          Case{NormTag::L2, NormTag::L2, l2_l2}}) {
      const InducedNorm r = induced_norm(q, c.from, c.to);
      EXPECT_TRUE(r.exact);
      EXPECT_NEAR(r.value, c.expect, 1e-9 * (1 + c.expect));
    }
  }
}

TEST(InducedNorm, LargeHardPairsAreUpperBounds) {
  Rng rng(19);
  const Matrix q = rng.gaussian_matrix(14, 14);
  const InducedNorm r = induced_norm(q, NormTag::LInf, NormTag::L1);
  EXPECT_FALSE(r.exact);
  for (int k = 0; k < 500; ++k) {
    Vector x(14);
    for (int j = 0; j < 14; ++j) x(j) = rng.coin() ? 1.0 : -1.0;
    EXPECT_LE((q * x).lpNorm<1>(), r.value + 1e-9);
  }
}

TEST(Omega, Examples) {
  Rng rng(20);
  const auto plain = SparsityStructure::singleton_groups(4);
  const Matrix w = rng.gaussian_matrix(4, 4);
  const OmegaMatrix om = omega(plain, w);
  EXPECT_TRUE(om.values.isApprox(w.cwiseAbs(), 1e-14));
  EXPECT_TRUE(omega(plain, Matrix::Zero(4, 4)).values.isZero());
  GroupParams g;
  g.n = 3;
  g.blocks = {{0, 1}, {2}};
  g.norms = {NormTag::L2, NormTag::L2};
  const auto gs = SparsityStructure::group(g);
  Matrix wb = Matrix::Zero(3, 3);
  wb.block(0, 0, 2, 2) << 3, 4, 0, 0;
  EXPECT_NEAR(omega(gs, wb).values(0, 0), 5.0, 1e-12);
  EXPECT_THROW(omega(gs, Matrix::Zero(2, 2)), DimensionMismatch);
}

TEST(Prox, Examples) {
  const auto plain = SparsityStructure::plain(2);
  const Vector u = prox_structure_norm(plain, vec({3, -0.5}), 1.0);
  EXPECT_NEAR(u(0), 2.0, 1e-12);
  EXPECT_NEAR(u(1), 0.0, 1e-12);
  const Vector p = project_ball(vec({3, 4}), NormTag::L2, 1.0);
  EXPECT_NEAR(p(0), 0.6, 1e-12);
  EXPECT_NEAR(p(1), 0.8, 1e-12);
  const auto lr = SparsityStructure::lowrank(2, 2);
  const Vector d = vectorize(vec({3, 2}).asDiagonal().toDenseMatrix());
  const Vector t = prox_structure_norm(lr, d, 2.5);
  EXPECT_NEAR(t(0), 0.5, 1e-12);
  EXPECT_NEAR(t.tail(3).norm(), 0.0, 1e-12);
}

TEST(Prox, SoftThresholdMatchesGridMinimization) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const double w = rng.uniform(-4.0, 4.0);
    const double tau = rng.uniform(0.1, 2.0);
    const double ref = oracle::grid_minimize(
        [&](double u) { return tau * std::abs(u) + 0.5 * (u - w) * (u - w); }, -5.0, 5.0, 2001);
    const Vector got = prox_structure_norm(SparsityStructure::plain(1), Vector::Constant(1, w), tau);
    double argmin = 0.0;
    oracle::grid_minimize([&](double u) { return tau * std::abs(u) + 0.5 * (u - w) * (u - w); }, -5.0,
                          5.0, 2001, &argmin);
    EXPECT_NEAR(got(0), argmin, 1e-6);
    (void)ref;
  }
}

TEST(Prox, OptimalityAgainstPerturbations) {
  Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    SparsityStructure st = trial % 3 == 0   ? SparsityStructure::plain(5)
                           : trial % 3 == 1 ? random_group(rng, 5, 3, true)
                                            : SparsityStructure::lowrank(3, 2);
    const Vector w = 2.0 * rng.gaussian_vector(st.dim_e());
    const double tau = rng.uniform(0.1, 1.5);
    const Vector u = prox_structure_norm(st, w, tau);
    auto obj = [&](const Vector& x) { return tau * structure_norm(st, x) + 0.5 * (x - w).squaredNorm(); };
    const double best = obj(u);
    for (int k = 0; k < 100; ++k) {
      const Vector v = u + rng.uniform(0.0, 0.5) * rng.gaussian_vector(st.dim_e());
      EXPECT_GE(obj(v), best - 1e-8);
    }
  }
}

TEST(ProjectBall, FeasibleAndClosest) {
  Rng rng(23);
  for (NormTag phi : {NormTag::L1, NormTag::L2, NormTag::LInf}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector v = 3.0 * rng.gaussian_vector(6);
      const double r = rng.uniform(0.0, 2.0);
      const Vector p = project_ball(v, phi, r);
      EXPECT_LE(vector_norm(p, phi), r + 1e-10);
      for (int k = 0; k < 100; ++k) {
        Vector c = rng.gaussian_vector(6);
        const double nc = vector_norm(c, phi);
        if (nc > 0) c *= rng.uniform(0.0, r) / nc;
        EXPECT_LE((p - v).norm(), (c - v).norm() + 1e-8);
      }
    }
  }
}

TEST(ProxVectorNorm, OptimalityAgainstPerturbations) {
  Rng rng(24);
  for (NormTag phi : {NormTag::L1, NormTag::L2, NormTag::LInf}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector v = 2.0 * rng.gaussian_vector(5);
      const double tau = rng.uniform(0.1, 2.0);
      const Vector u = prox_vector_norm(v, phi, tau);
      auto obj = [&](const Vector& x) { return tau * vector_norm(x, phi) + 0.5 * (x - v).squaredNorm(); };
      for (int k = 0; k < 100; ++k)
        EXPECT_GE(obj(u + 0.3 * rng.gaussian_vector(5)), obj(u) - 1e-8);
    }
  }
}

TEST(NormTags, DualPairs) {
  EXPECT_EQ(dual(NormTag::L1), NormTag::LInf);
  EXPECT_EQ(dual(NormTag::L2), NormTag::L2);
  EXPECT_EQ(dual(NormTag::LInf), NormTag::L1);
  EXPECT_EQ(dual(NormTag::Nuclear), NormTag::Spectral);
  EXPECT_EQ(dual(NormTag::Spectral), NormTag::Nuclear);
  EXPECT_EQ(norm_from_string(to_string(NormTag::LInf)), NormTag::LInf);
  EXPECT_THROW(norm_from_string("l3"), Error);
}
