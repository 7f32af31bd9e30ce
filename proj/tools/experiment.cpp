#include "experiment.hpp"

#include "structrec/linalg.hpp"
#include "structrec/norms.hpp"
#include "structrec/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

namespace structrec {

namespace {

std::uint64_t required_seed(const Json& section, const std::string& name) {
  if (!section.contains("seed") || !section["seed"].is_number_unsigned())
    throw Error("config: " + name + ".seed must be a nonnegative integer");
  return section["seed"].get<std::uint64_t>();
}

BoundMode mode_from_string(const std::string& name) {
  if (name == "regular") return BoundMode::Regular;
  if (name == "penalized") return BoundMode::Penalized;
  throw Error("config: unknown recovery mode '" + name + "'");
}

// Signal with B x fixed by a projector of weight <= s (up to block overlap).
Vector draw_signal(const SparsityStructure& st, double s, const std::string& magnitude, Rng& rng) {
  auto mag = [&]() {
    if (magnitude == "unit") return rng.coin() ? 1.0 : -1.0;
    return rng.gaussian();
  };
  Vector x = Vector::Zero(st.dim_x());
  switch (st.kind()) {
    case StructureKind::Plain: {
      const int k = std::min(static_cast<int>(std::floor(s + 1e-12)), st.dim_x());
      for (int i : rng.subset(st.dim_x(), k)) x(i) = mag();
      break;
    }
    case StructureKind::Group: {
      const auto p = std::get<BlockProjector>(random_projector(st, rng, s));
      for (int l : p.blocks)
        for (int i : st.block(l)) x(i) = mag();
      break;
    }
    case StructureKind::LowRank: {
      const int k = std::min(static_cast<int>(std::floor(s + 1e-12)), st.cols());
      const Matrix u = orthonormalize(rng.gaussian_matrix(st.rows(), k));
      const Matrix v = orthonormalize(rng.gaussian_matrix(st.cols(), k));
      Vector sv(k);
      for (int i = 0; i < k; ++i) sv(i) = std::abs(mag());
      x = vectorize(u * sv.asDiagonal() * v.transpose());
      break;
    }
  }
  return x;
}

Vector draw_noise(Eigen::Index m, NormTag phi, double radius, const std::string& law, Rng& rng) {
  if (m == 0 || radius == 0.0) return Vector::Zero(m);
  Vector g = rng.gaussian_vector(m);
  const double r = law == "sphere" ? radius : radius * rng.uniform(0.0, 1.0);
  return g * (r / vector_norm(g, phi));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_experiment_config(const Json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    c.structure = structure_from_json(j.at("structure"));
    const Json& sensing = j.at("sensing");
    const std::string kind = sensing.value("kind", "gaussian");
    if (kind == "gaussian") {
      c.m = sensing.at("m").get<int>();
      if (c.m < 0) throw Error("config: sensing.m must be nonnegative");
      c.sensing_seed = required_seed(sensing, "sensing");
      Rng rng(c.sensing_seed);
      c.A = rng.gaussian_matrix(c.m, c.structure.dim_x()) / std::sqrt(std::max(1, c.m));
    } else if (kind == "file") {
      c.A = columns_to_internal(c.structure, matrix_from_json(sensing.at("path"), base_dir));
      c.m = static_cast<int>(c.A.rows());
    } else {
      throw Error("config: sensing.kind must be 'gaussian' or 'file'");
    }
    if (c.A.cols() != c.structure.dim_x()) throw Error("config: A must have dim(X) columns");

    const Json& signal = j.at("signal");
    c.s = signal.at("s").get<double>();
    if (!(c.s >= 0)) throw Error("config: signal.s must be nonnegative");
    c.magnitude = signal.value("magnitude", "unit");
    if (c.magnitude != "unit" && c.magnitude != "gaussian")
      throw Error("config: signal.magnitude must be 'unit' or 'gaussian'");
    c.signal_seed = required_seed(signal, "signal");

    const Json& noise = j.at("noise");
    c.epsilon = noise.value("epsilon", 0.0);
    c.epsilon_max = noise.value("epsilon_max", 0.0);
    if (c.epsilon < 0 || c.epsilon_max < 0) throw Error("config: noise radii must be nonnegative");
    c.noise_law = noise.value("law", "ball");
    if (c.noise_law != "ball" && c.noise_law != "sphere")
      throw Error("config: noise.law must be 'ball' or 'sphere'");
    c.noise_seed = required_seed(noise, "noise");

    c.phi = norm_from_string(j.value("phi", "l1"));
    if (!is_vector_norm(c.phi)) throw Error("config: phi must be l1, l2 or linf");
    if (j.contains("modes")) {
      c.modes.clear();
      for (const auto& m : j["modes"]) c.modes.push_back(mode_from_string(m.get<std::string>()));
      if (c.modes.empty()) throw Error("config: modes must not be empty");
    }
    c.method = cert_method_from_string(j.value("certificate", std::string("column-lp")));
    c.lambda_factor = j.value("lambda_factor", 1.0);
    if (!(c.lambda_factor >= 1.0)) throw Error("config: lambda_factor must be >= 1");
    c.trials = j.at("trials").get<int>();
    if (c.trials < 1) throw Error("config: trials must be >= 1");
    if (j.contains("output")) {
      c.csv_path = j["output"].value("csv", "");
      c.summary_path = j["output"].value("summary", "");
    }
  } catch (const Json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return c;
}

Certificate make_certificate(const Matrix& a, const SparsityStructure& st, double s, NormTag phi,
                             CertMethod method) {
  switch (method) {
    case CertMethod::ColumnLP: return synth_certificate_group(a, st, s, phi);
    case CertMethod::BruteForce: return bruteforce_certificate(a, st, s, phi);
    case CertMethod::LowRankUBar:
    case CertMethod::LowRankUStar: {
      if (s != std::floor(s)) throw Error("low-rank certificates need an integer s");
      LowRankOptions opt;
      opt.use_opt_star = method == CertMethod::LowRankUStar;
      return certify_lowrank(a, st, static_cast<int>(s), phi, opt);
    }
  }
  throw Error("unknown certificate method");
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Certificate& cert,
                                int threads, double tol) {
  if (!cert.valid) throw GammaTooLarge("experiment: certificate has gamma >= 1");
  const SparsityStructure& st = config.structure;
  const RepresentationMap rep = representation_map(st);
  const std::size_t per_trial = config.modes.size();
  std::vector<TrialRow> rows(config.trials * per_trial);
  std::vector<std::exception_ptr> errors(config.trials);

  RecoveryOptions ropt;
  ropt.tol = tol;

  auto run_trial = [&](int t) {
    Rng sig(config.signal_seed, t);
    Rng noi(config.noise_seed, t);
    const Vector x0 = draw_signal(st, config.s, config.magnitude, sig);
    const double eps =
        config.epsilon_max > 0 ? config.epsilon_max * (1.0 - noi.uniform(0.0, 1.0)) : config.epsilon;
    const Vector xi = draw_noise(config.A.rows(), config.phi, eps, config.noise_law, noi);
    RecoveryProblem problem{config.A, config.A * x0 + xi, config.phi, eps};
    const Vector w0 = rep.apply(x0);
    const double delta_x = best_sparse_approx(st, w0, config.s).delta_x;
    for (std::size_t k = 0; k < per_trial; ++k) {
      const BoundMode mode = config.modes[k];
      TrialRow row;
      row.trial = t;
      row.mode = mode;
      row.s = config.s;
      row.epsilon = eps;
      row.gamma = cert.gamma;
      row.beta = cert.beta;
      ErrorBudget budget;
      budget.delta_x = delta_x;
      RecoveryResult res;
      if (mode == BoundMode::Regular) {
        res = recover_regular(problem, st, ropt);
        budget.epsilon = eps;
        budget.delta_phi = res.delta_phi;
      } else {
        budget.lambda = config.lambda_factor * cert.beta;
        if (!(budget.lambda > 0)) throw Error("experiment: penalized mode needs beta > 0");
        res = recover_penalized(problem, st, budget.lambda, ropt);
        budget.phi_xi = config.A.rows() > 0 ? vector_norm(xi, config.phi) : 0.0;
      }
      budget.delta = res.delta;
      row.error = structure_norm(st, res.w_hat - w0);
      row.bound = error_bound(cert.gamma, cert.beta, budget, mode);
      row.margin = row.bound - row.error;
      rows[t * per_trial + k] = row;
    }
  };

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int t = next++; t < config.trials; t = next++) {
      try {
        run_trial(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min(threads, config.trials));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult result;
  result.certificate = cert;
  result.rows = std::move(rows);
  result.min_margin = kInf;
  for (const auto& r : result.rows) {
    if (r.error > r.bound + 1e-6) ++result.violations;
    result.max_error = std::max(result.max_error, r.error);
    result.min_margin = std::min(result.min_margin, r.margin);
  }
  return result;
}

std::string rows_to_csv(const std::vector<TrialRow>& rows) {
  std::ostringstream out;
  out << "trial,mode,s,epsilon,gamma,beta,error,bound,margin\n";
  for (const auto& r : rows)
    out << r.trial << ',' << to_string(r.mode) << ',' << fmt(r.s) << ',' << fmt(r.epsilon) << ','
        << fmt(r.gamma) << ',' << fmt(r.beta) << ',' << fmt(r.error) << ',' << fmt(r.bound) << ','
        << fmt(r.margin) << '\n';
  return out.str();
}

Json summary_to_json(const ExperimentResult& result) {
  return {{"rows", result.rows.size()},
          {"violations", result.violations},
          {"max_error", real_to_json(result.max_error)},
          {"min_margin", real_to_json(result.min_margin)},
          {"gamma", real_to_json(result.certificate.gamma)},
          {"beta", real_to_json(result.certificate.beta)},
          {"method", to_string(result.certificate.method)}};
}

}  // namespace structrec
