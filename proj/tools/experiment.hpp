#pragma once

// Randomized bound-versus-error experiments: one sensing matrix, one
// certificate, many (signal, noise) trials recovered in each requested mode.

#include "structrec/certify.hpp"
#include "structrec/io.hpp"
#include "structrec/recovery.hpp"
#include "structrec/structures.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace structrec {

struct ExperimentConfig {
  SparsityStructure structure = SparsityStructure::plain(1);
  Matrix A;  // internal orientation, resolved from the sensing section
  int m = 0;
  std::uint64_t sensing_seed = 0;
  double s = 1.0;
  std::string magnitude = "unit";  // "unit" | "gaussian"
  std::uint64_t signal_seed = 0;
  double epsilon = 0.0;            // fixed radius, used when epsilon_max == 0
  double epsilon_max = 0.0;        // > 0: radius drawn uniformly from (0, epsilon_max]
  std::string noise_law = "ball";  // "ball" | "sphere"
  std::uint64_t noise_seed = 0;
  NormTag phi = NormTag::L1;
  std::vector<BoundMode> modes = {BoundMode::Regular};
  CertMethod method = CertMethod::ColumnLP;
  double lambda_factor = 1.0;  // lambda = lambda_factor * beta
  int trials = 0;
  std::string csv_path;
  std::string summary_path;
};

/// Throws Error on schema violations (missing seeds, trials < 1, bad tags).
ExperimentConfig parse_experiment_config(const Json& j, const std::filesystem::path& base_dir);

struct TrialRow {
  int trial = 0;
  BoundMode mode = BoundMode::Regular;
  double s = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double error = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - error
};

struct ExperimentResult {
  Certificate certificate;
  std::vector<TrialRow> rows;  // ordered by (trial, mode)
  int violations = 0;          // rows with error > bound + 1e-6
  double max_error = 0.0;
  double min_margin = 0.0;
};

Certificate make_certificate(const Matrix& a, const SparsityStructure& st, double s, NormTag phi,
                             CertMethod method);

/// Runs all trials (in parallel over trial indices when threads > 1); results
/// do not depend on the thread count. Requires a valid certificate.
ExperimentResult run_experiment(const ExperimentConfig& config, const Certificate& cert,
                                int threads, double tol);

std::string rows_to_csv(const std::vector<TrialRow>& rows);
Json summary_to_json(const ExperimentResult& result);

}  // namespace structrec
