#pragma once

#include "structrec/structures.hpp"
#include "structrec/types.hpp"

#include <vector>

namespace structrec {

/// l1, l2 or linf norm of a vector.
double vector_norm(const Vector& v, NormTag tag);

/// Nuclear or spectral norm of a matrix; vector tags act on the entries.
double matrix_norm(const Matrix& m, NormTag tag);

/// ||x||_{s,1}: sum of the s largest magnitudes (the l1 norm once s >= dim).
double sum_top(const Vector& x, int s);

enum class PiVariant { Exact, Hat };

/// pi_s(u) = 2 max { sum eta_l |u_l| : eta in {0,1}^K, sum chi_l eta_l <= s }.
/// The hat variant relaxes eta to 0 <= eta_l <= min(1, floor(s / chi_l)) and
/// is never smaller than the exact value. The exact variant throws
/// Unsupported for non-integer weights with more than 25 blocks.
double pi_s(const Vector& u, const std::vector<double>& chi, double s,
            PiVariant variant = PiVariant::Exact);

/// Sum of the k largest singular values; k >= min(rows, cols) gives the
/// nuclear norm.
double sigma_sum(const Matrix& z, int k);

/// Norm of the structure on E (dual = false) or its conjugate (dual = true).
double structure_norm(const SparsityStructure& structure, const Vector& w, bool dual = false);

/// The seminorm ||.||_{P_s} bounding ||PBz|| + ||Bz|| - ||P̄Bz|| over P_s:
/// 2||z||_{s,1} (plain), pi_s of block norms (group), Sigma_s + Sigma_2s (low rank).
double ps_seminorm(const SparsityStructure& structure, const Vector& z, double s);

struct InducedNorm {
  double value = 0.0;
  bool exact = true;
};

/// max { ||Q u||_to : ||u||_from <= 1 } for from, to in {L1, L2, LInf}.
/// Exact for from = L1, to = LInf and L2 -> L2. The three remaining pairs are
/// computed by extreme-point enumeration when the relevant dimension is at
/// most 12 and otherwise bounded from above (exact = false).
InducedNorm induced_norm(const Matrix& q, NormTag from, NormTag to);

/// Omega[W]_{kl} = ||W^{kl}||_{(l k)} for the block partition of E.
struct OmegaMatrix {
  Matrix values;
  bool exact = true;
};

OmegaMatrix omega(const SparsityStructure& structure, const Matrix& w);

/// argmin_u tau ||u|| + 1/2 ||u - w||_2^2 for the structure norm.
Vector prox_structure_norm(const SparsityStructure& structure, const Vector& w, double tau);

/// Euclidean projection onto { u : ||u||_phi <= radius }.
Vector project_ball(const Vector& v, NormTag phi, double radius);

/// argmin_u tau ||u||_phi + 1/2 ||u - v||_2^2, phi in {L1, L2, LInf}.
Vector prox_vector_norm(const Vector& v, NormTag phi, double tau);

}  // namespace structrec
