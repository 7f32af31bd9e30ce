#pragma once

// File formats: JSON for structures, problems and certificates; CSV for
// matrices (first line "rows,cols", then one row-major line per row).
//
// Low-rank orientation: users describe X = R^{p x q} in their own shape and
// vectorize column-major. When p < q the library stores the transpose, so
// matrices acting on X (A's columns) and vectors in X are permuted on the way
// in and out by the helpers below.

#include "structrec/certify.hpp"
#include "structrec/recovery.hpp"
#include "structrec/structures.hpp"
#include "structrec/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace structrec {

using Json = nlohmann::json;

Json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const Json& doc);

Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Reals with +-inf and nan encoded as the strings "inf", "-inf", "nan".
Json real_to_json(double v);
double real_from_json(const Json& j);

/// {"rows", "cols", "data" (row-major)}: exact round trip, empty shapes kept.
Json matrix_to_json(const Matrix& m);
/// Accepts the object form above, a nested array of rows, or a string naming
/// a CSV file (resolved against base_dir when relative).
Matrix matrix_from_json(const Json& j, const std::filesystem::path& base_dir = {});

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// {"kind": "plain", "n"} | {"kind": "group", "n", "blocks", "weights",
/// "block_norms"} | {"kind": "lowrank", "p", "q"}; block indices are 0-based.
Json structure_to_json(const SparsityStructure& st);
SparsityStructure structure_from_json(const Json& j);

/// Column permutation of A from the user vectorization to the internal one
/// (identity unless the structure is a transposed low-rank one).
Matrix columns_to_internal(const SparsityStructure& st, const Matrix& a);
Matrix columns_to_user(const SparsityStructure& st, const Matrix& a);
Vector vector_to_internal(const SparsityStructure& st, const Vector& x);
Vector vector_to_user(const SparsityStructure& st, const Vector& x);

struct ProblemSpec {
  SparsityStructure structure = SparsityStructure::plain(1);
  RecoveryProblem problem;  // A in internal orientation
};

/// {"structure", "A", "y", "phi" (default "l2"), "epsilon" (default 0)}.
ProblemSpec problem_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json problem_to_json(const ProblemSpec& spec);

Json certificate_to_json(const Certificate& cert, bool with_matrices);
Certificate certificate_from_json(const Json& j);

}  // namespace structrec
