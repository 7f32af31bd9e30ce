#include "structrec/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>

namespace structrec {

NormTag dual(NormTag tag) {
  switch (tag) {
    case NormTag::L1: return NormTag::LInf;
    case NormTag::L2: return NormTag::L2;
    case NormTag::LInf: return NormTag::L1;
    case NormTag::Nuclear: return NormTag::Spectral;
    case NormTag::Spectral: return NormTag::Nuclear;
  }
  return tag;
}

std::string to_string(NormTag tag) {
  switch (tag) {
    case NormTag::L1: return "l1";
    case NormTag::L2: return "l2";
    case NormTag::LInf: return "linf";
    case NormTag::Nuclear: return "nuclear";
    case NormTag::Spectral: return "spectral";
  }
  return "?";
}

NormTag norm_from_string(std::string_view name) {
  if (name == "l1" || name == "L1") return NormTag::L1;
  if (name == "l2" || name == "L2") return NormTag::L2;
  if (name == "linf" || name == "LInf" || name == "Linf") return NormTag::LInf;
  if (name == "nuclear") return NormTag::Nuclear;
  if (name == "spectral") return NormTag::Spectral;
  throw Error("unknown norm tag '" + std::string(name) + "'");
}

Svd svd(const Matrix& a) {
  Svd out;
  if (a.size() == 0) {
    out.U = Matrix::Zero(a.rows(), 0);
    out.V = Matrix::Zero(a.cols(), 0);
    out.sigma = Vector::Zero(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.U = dec.matrixU();
  out.V = dec.matrixV();
  out.sigma = dec.singularValues();
  // JacobiSVD already sorts descending; the sign convention is ours.
  for (Eigen::Index j = 0; j < out.U.cols(); ++j) {
    const double scale = out.U.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < out.U.rows(); ++i) {
      if (std::abs(out.U(i, j)) > 1e-12 * scale) {
        if (out.U(i, j) < 0) {
          out.U.col(j) *= -1.0;
          out.V.col(j) *= -1.0;
        }
        break;
      }
    }
  }
  return out;
}

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector::Zero(0);
  // Exactly orthogonal columns (or rows, for wide matrices): the singular
  // values are the column (row) norms, with no rotation round-off.
  const Matrix gram = a.rows() >= a.cols() ? Matrix(a.transpose() * a) : Matrix(a * a.transpose());
  bool diagonal = true;
  for (Eigen::Index j = 0; j < gram.cols() && diagonal; ++j)
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
      if (i != j && gram(i, j) != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    Vector sv = gram.diagonal().cwiseSqrt();
    std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
    return sv;
  }
  Eigen::JacobiSVD<Matrix> dec(a);
  return dec.singularValues();
}

int numerical_rank(const Matrix& a, double tol) {
  const Vector s = singular_values(a);
  if (s.size() == 0) return 0;
  const double thresh =
      tol * std::max(1.0, s(0)) * static_cast<double>(std::max(a.rows(), a.cols()));
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > thresh) ++r;
  }
  return r;
}

Matrix kernel_basis(const Matrix& a, double tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeFullV);
  const Vector& s = dec.singularValues();
  const double thresh =
      tol * std::max(1.0, s.size() ? s(0) : 0.0) * static_cast<double>(std::max(a.rows(), n));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > thresh) ++r;
  }
  return dec.matrixV().rightCols(n - r);
}

Matrix pseudo_inverse(const Matrix& a, double tol) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  const Svd d = svd(a);
  const double thresh = tol * std::max(1.0, d.sigma.size() ? d.sigma(0) : 0.0) *
                        static_cast<double>(std::max(a.rows(), a.cols()));
  Vector inv = Vector::Zero(d.sigma.size());
  for (Eigen::Index i = 0; i < d.sigma.size(); ++i) {
    if (d.sigma(i) > thresh) inv(i) = 1.0 / d.sigma(i);
  }
  return d.V * inv.asDiagonal() * d.U.transpose();
}

Matrix orthonormalize(const Matrix& a) {
  if (a.cols() == 0) return Matrix::Zero(a.rows(), 0);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace structrec
