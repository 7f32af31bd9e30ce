#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace structrec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Norms used for the representation space, the blocks of a group structure
/// and the observation-noise measure.
enum class NormTag { L1, L2, LInf, Nuclear, Spectral };

NormTag dual(NormTag tag);
std::string to_string(NormTag tag);
NormTag norm_from_string(std::string_view name);

/// True for the three vector norms a block or a noise measure may use.
inline bool is_vector_norm(NormTag tag) {
  return tag == NormTag::L1 || tag == NormTag::L2 || tag == NormTag::LInf;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested combination has no implemented (exact) route.
class Unsupported : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidStructure : public Error {
 public:
  using Error::Error;
};

class GammaTooLarge : public Error {
 public:
  using Error::Error;
};

class LambdaBelowBeta : public Error {
 public:
  using Error::Error;
};

}  // namespace structrec
