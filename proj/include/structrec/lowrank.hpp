#pragma once

// Low-rank certification machinery on X = R^{p x q} (p >= q, column-major
// vectorization). Linear maps W : X -> X are stored as pq x pq matrices acting
// on vec(z).
//
// Theta[W] is the pq x pq matrix, viewed as a q x p grid of p x q blocks,
// whose block (mu, nu) holds the coefficients of (W z)_{nu mu}:
//   Theta(mu p + k, nu q + l) = W(nu + mu p, k + l p),
// so that <Theta[W], h^T (x) z>_F = Tr((W z) h^T).

#include "structrec/lp.hpp"
#include "structrec/rng.hpp"
#include "structrec/types.hpp"

#include <functional>
#include <vector>

namespace structrec {

/// Materializes a linear map on R^{p x q} as its pq x pq matrix.
Matrix operator_matrix(const std::function<Matrix(const Matrix&)>& map, int p, int q);

Matrix theta(const Matrix& w, int p, int q);
/// Inverse of theta: recovers W from Theta[W].
Matrix theta_inverse(const Matrix& t, int p, int q);

/// h^T (x) z as a pq x pq matrix: block (mu, nu) equals h(nu, mu) z.
Matrix kron_ht_z(const Matrix& h, const Matrix& z);

enum class Rearrangement { MPrime, MDoublePrime };

/// Entry rearrangements of a pq x pq matrix U:
///   MPrime:       p^2 x q^2, maps h^T (x) w to h (x) w;
///   MDoublePrime: pq x pq,   maps h^T (x) w to Col(h^T) Col(w)^T.
Matrix rearrange(const Matrix& u, int p, int q, Rearrangement which);
/// Adjoint (= inverse) of rearrange.
Matrix rearrange_adjoint(const Matrix& v, int p, int q, Rearrangement which);

/// Sigma_s(Theta[W]) + Sigma_2s(Theta[W]).
double opt_bar(const Matrix& w, int p, int q, int s);

struct OptStarOptions {
  int iterations = 2000;
  double step = 0.5;  // relative to ||Theta||_F
};

struct OptStarResult {
  double value = 0.0;       // sum over k in {s, 2s}
  double per_k[2] = {0, 0};
  double opt_bar = 0.0;     // value at the zero splitting
  int iterations = 0;
};

/// Upper bound on max <Theta[W], U + V> over U in Z*_s, V in Z*_2s, where
///   Z*_k = { U : ||U||_* <= k, ||U||_2 <= 1, ||M'U||_* <= k, ||M'U||_2 <= 1,
///            ||M''U||_* <= sqrt(k) }.
/// Each k is handled by subgradient descent over splittings
/// Theta = T1 + T2 + T3 of Sigma_k(T1) + Sigma_k(M'T2) + sqrt(k) sigma_1(M''T3),
/// starting from T2 = T3 = 0; every iterate is an upper bound and the best one
/// is returned.
OptStarResult opt_star(const Matrix& w, int p, int q, int s, const OptStarOptions& options = {});

/// Lower bound on Opt[W] = max_{||z||_* <= 1} Sigma_s(Wz) + Sigma_2s(Wz) (and
/// therefore on every relaxation above) by alternating maximization over
/// rank-one z from random starts.
double sampled_primal_bound(const Matrix& w, int p, int q, int s, int starts, Rng& rng);

/// min(2 s sqrt(d / pq), sqrt(d)) with d = dim Ker(A).
double badnews_floor(const Matrix& a, int p, int q, int s);

struct BadNews {
  double lhs = 0.0;
  double floor = 0.0;
  bool holds = false;
};

/// lhs = opt_bar(I - H^T A, s) against the floor above.
BadNews badnews_check(const Matrix& a, const Matrix& h, int p, int q, int s);

}  // namespace structrec
