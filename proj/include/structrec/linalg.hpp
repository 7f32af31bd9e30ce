#pragma once

#include "structrec/types.hpp"

namespace structrec {

/// Thin SVD with singular values sorted in descending order. Each left
/// singular vector has its first non-negligible entry positive; the matching
/// right vector is flipped along with it.
struct Svd {
  Matrix U;
  Vector sigma;
  Matrix V;
};

Svd svd(const Matrix& a);
Vector singular_values(const Matrix& a);

/// Rank with the threshold tol * max(1, sigma_1) * max(rows, cols).
int numerical_rank(const Matrix& a, double tol = 1e-12);

/// Orthonormal basis of Ker(a), as columns (n x dim Ker).
Matrix kernel_basis(const Matrix& a, double tol = 1e-12);

Matrix pseudo_inverse(const Matrix& a, double tol = 1e-12);

/// Orthonormal basis of the column span of a (Householder QR).
Matrix orthonormalize(const Matrix& a);

/// Column-major reshape of an E-vector into a rows x cols matrix.
inline Matrix reshape(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

inline Vector vectorize(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace structrec
