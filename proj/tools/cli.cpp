#include "cli.hpp"

#include "experiment.hpp"

#include "structrec/certify.hpp"
#include "structrec/io.hpp"
#include "structrec/recovery.hpp"
#include "structrec/structures.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

namespace structrec {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  double tol = 1e-8;
  bool json = false;
  int threads = 1;
};

struct Sensing {
  SparsityStructure structure = SparsityStructure::plain(1);
  Matrix A;  // internal orientation
  NormTag phi = NormTag::L1;
};

// Structure, matrix and noise norm either from one problem file or from
// separate structure and matrix files.
Sensing load_sensing(const std::string& problem, const std::string& structure,
                     const std::string& matrix) {
  Sensing s;
  if (!problem.empty()) {
    const Json j = load_json(problem);
    const fs::path base = fs::path(problem).parent_path();
    try {
      s.structure = structure_from_json(j.at("structure"));
      s.A = columns_to_internal(s.structure, matrix_from_json(j.at("A"), base));
      if (j.contains("phi")) s.phi = norm_from_string(j["phi"].get<std::string>());
    } catch (const Json::exception& e) {
      throw Error(std::string("problem: ") + e.what());
    }
  } else {
    if (structure.empty() || matrix.empty())
      throw Error("give --problem, or both --structure and --matrix");
    s.structure = structure_from_json(load_json(structure));
    s.A = columns_to_internal(s.structure, read_matrix_csv(matrix));
  }
  if (s.A.cols() != s.structure.dim_x()) throw DimensionMismatch("A must have dim(X) columns");
  return s;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int exit_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return kExitOk;
    case SolveStatus::MaxIter: return kExitMaxIter;
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::Unbounded: return kExitInput;
  }
  return kExitInput;
}

Backend backend_from_string(const std::string& name) {
  if (name == "auto") return Backend::Auto;
  if (name == "lp") return Backend::Lp;
  if (name == "split") return Backend::Split;
  throw Error("unknown backend '" + name + "'");
}

// Emits a JSON document with --json, otherwise "key: value" lines for the
// scalar members.
void emit(std::ostream& out, const Globals& g, const Json& doc) {
  if (g.json) {
    out << doc.dump(2) << '\n';
    return;
  }
  for (const auto& [key, value] : doc.items()) {
    if (value.is_structured()) continue;
    out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
}

// --- recover -------------------------------------------------------------------

struct RecoverArgs {
  std::string problem;
  std::string mode = "regular";
  double lambda = 0.0;
  std::string backend = "auto";
  int max_iterations = 50000;
  std::string out;
};

int cmd_recover(const RecoverArgs& a, const Globals& g, std::ostream& out) {
  const ProblemSpec spec = problem_from_json(load_json(a.problem), fs::path(a.problem).parent_path());
  RecoveryOptions opt;
  opt.backend = backend_from_string(a.backend);
  opt.tol = g.tol;
  opt.max_iterations = a.max_iterations;
  RecoveryResult r;
  if (a.mode == "regular") {
    r = recover_regular(spec.problem, spec.structure, opt);
  } else if (a.mode == "penalized") {
    if (!(a.lambda > 0)) throw Error("--mode penalized needs --lambda > 0");
    r = recover_penalized(spec.problem, spec.structure, a.lambda, opt);
  } else {
    throw Error("--mode must be 'regular' or 'penalized'");
  }
  const bool have_x = r.report.status == SolveStatus::Optimal || r.report.status == SolveStatus::MaxIter;
  Json doc = {{"status", to_string(r.report.status)},
              {"mode", a.mode},
              {"backend", to_string(r.backend)},
              {"objective", real_to_json(r.objective)},
              {"delta", real_to_json(r.delta)},
              {"delta_phi", real_to_json(r.delta_phi)},
              {"iterations", r.report.iterations},
              {"primal_residual", real_to_json(r.report.primal_residual)},
              {"dual_residual", real_to_json(r.report.dual_residual)},
              {"regularized", r.report.regularized}};
  if (have_x) {
    const bool lowrank = spec.structure.kind() == StructureKind::LowRank;
    doc["x_hat"] = vector_to_json(vector_to_user(spec.structure, r.x_hat));
    doc["w_hat"] = vector_to_json(lowrank ? vector_to_user(spec.structure, r.w_hat) : r.w_hat);
  }
  if (!a.out.empty()) save_json(a.out, doc);
  emit(out, g, doc);
  if (!g.json && have_x) {
    out << "x_hat:";
    for (const auto& v : doc["x_hat"]) out << ' ' << num(real_from_json(v));
    out << '\n';
  }
  return exit_for(r.report.status);
}

// --- certify -------------------------------------------------------------------

struct CertifyArgs {
  std::string problem, structure, matrix;
  double s = 1.0;
  std::string method;
  std::string phi;
  std::string out;
  bool with_matrices = false;
};

int cmd_certify(const CertifyArgs& a, const Globals& g, std::ostream& out) {
  Sensing sn = load_sensing(a.problem, a.structure, a.matrix);
  if (!a.phi.empty()) sn.phi = norm_from_string(a.phi);
  CertMethod method = sn.structure.kind() == StructureKind::LowRank ? CertMethod::LowRankUStar
                                                                     : CertMethod::ColumnLP;
  if (!a.method.empty()) method = cert_method_from_string(a.method);
  const Certificate cert = make_certificate(sn.A, sn.structure, a.s, sn.phi, method);
  const Json doc = certificate_to_json(cert, a.with_matrices);
  if (!a.out.empty()) save_json(a.out, doc);
  emit(out, g, doc);
  return cert.valid ? kExitOk : kExitNotCertified;
}

// --- nullspace -----------------------------------------------------------------

struct NullspaceArgs {
  std::string problem, structure, matrix;
  double s = 1.0;
  long max_lps = 20000;
};

int cmd_nullspace(const NullspaceArgs& a, const Globals& g, std::ostream& out) {
  const Sensing sn = load_sensing(a.problem, a.structure, a.matrix);
  BruteForceOptions opt;
  opt.max_lps = a.max_lps;
  opt.seed = g.seed;
  const NullspaceVerdict v = gamma_s_bruteforce(sn.A, sn.structure, a.s, opt);
  Json doc = {{"status", to_string(v.status)},
              {"gamma_s_lo", real_to_json(v.lo)},
              {"gamma_s_hi", real_to_json(v.hi)},
              {"lps_solved", v.lps_solved},
              {"note", v.note}};
  if (v.witness.size() > 0) doc["witness"] = vector_to_json(vector_to_user(sn.structure, v.witness));
  emit(out, g, doc);
  return v.status == Verdict::CertifiedGood ? kExitOk : kExitNotCertified;
}

// --- bound ---------------------------------------------------------------------

struct BoundArgs {
  double gamma = 0.0, beta = 0.0;
  std::string mode = "regular";
  ErrorBudget budget;
};

int cmd_bound(const BoundArgs& a, const Globals& g, std::ostream& out) {
  BoundMode mode;
  if (a.mode == "regular") mode = BoundMode::Regular;
  else if (a.mode == "penalized") mode = BoundMode::Penalized;
  else throw Error("--mode must be 'regular' or 'penalized'");
  double value = 0.0;
  try {
    value = error_bound(a.gamma, a.beta, a.budget, mode);
  } catch (const GammaTooLarge& e) {
    emit(out, g, {{"error", e.what()}});
    return kExitNotCertified;
  } catch (const LambdaBelowBeta& e) {
    emit(out, g, {{"error", e.what()}});
    return kExitNotCertified;
  }
  emit(out, g, {{"mode", a.mode}, {"bound", real_to_json(value)}});
  return kExitOk;
}

// --- experiment ----------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  std::string csv;
  std::string summary;
};

int cmd_experiment(const ExperimentArgs& a, const Globals& g, std::ostream& out,
                   std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = parse_experiment_config(load_json(a.config), fs::path(a.config).parent_path());
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  if (!a.csv.empty()) cfg.csv_path = a.csv;
  if (!a.summary.empty()) cfg.summary_path = a.summary;
  const Certificate cert = make_certificate(cfg.A, cfg.structure, cfg.s, cfg.phi, cfg.method);
  if (!cert.valid) {
    emit(out, g, {{"error", "certificate has gamma >= 1"}, {"gamma", real_to_json(cert.gamma)}});
    return kExitNotCertified;
  }
  const ExperimentResult res = run_experiment(cfg, cert, g.threads, g.tol);
  const std::string csv = rows_to_csv(res.rows);
  const Json summary = summary_to_json(res);
  if (!cfg.csv_path.empty()) {
    std::ofstream f(cfg.csv_path);
    if (!f) throw Error("cannot write " + cfg.csv_path);
    f << csv;
  }
  if (!cfg.summary_path.empty()) save_json(cfg.summary_path, summary);
  if (g.json) {
    out << summary.dump(2) << '\n';
  } else {
    if (cfg.csv_path.empty()) out << csv;
    out << "# rows " << res.rows.size() << ", violations " << res.violations << ", max error "
        << num(res.max_error) << ", min margin " << num(res.min_margin) << '\n';
  }
  return res.violations == 0 ? kExitOk : kExitAssertion;
}

// --- axioms --------------------------------------------------------------------

struct AxiomArgs {
  std::string structure;
  int trials = 1000;
};

Json check_json(const AxiomCheck& c) {
  return {{"worst_margin", real_to_json(c.worst_margin)}, {"violations", c.violations}};
}

int cmd_axioms(const AxiomArgs& a, const Globals& g, std::ostream& out) {
  if (a.trials < 1) throw Error("--trials must be >= 1");
  const SparsityStructure st = structure_from_json(load_json(a.structure));
  const AxiomReport r = verify_axioms(st, a.trials, g.seed);
  const AxiomCheck lemma = verify_nullspace_inequality(st, a.trials, g.seed + 1);
  const bool ok = r.ok() && lemma.violations == 0;
  const Json doc = {{"trials", a.trials},
                    {"ok", ok},
                    {"idempotent", check_json(r.idempotent)},
                    {"annihilates", check_json(r.annihilates)},
                    {"dual_contraction", check_json(r.dual_contraction)},
                    {"nullspace_inequality", check_json(lemma)}};
  if (g.json) {
    out << doc.dump(2) << '\n';
  } else {
    for (const char* key : {"idempotent", "annihilates", "dual_contraction", "nullspace_inequality"})
      out << key << ": worst margin " << num(real_from_json(doc[key]["worst_margin"]))
          << ", violations " << doc[key]["violations"].get<int>() << '\n';
  }
  return ok ? kExitOk : kExitAssertion;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured sparse recovery and nullspace certificates"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for randomized checks")->capture_default_str();
  app.add_option("--tol", g.tol, "Solver tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--threads", g.threads, "Worker threads for experiments")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  RecoverArgs rec;
  auto* c_rec = app.add_subcommand("recover", "Norm-minimization recovery");
  c_rec->add_option("--problem", rec.problem, "Problem JSON")->required();
  c_rec->add_option("--mode", rec.mode, "regular | penalized")->capture_default_str();
  c_rec->add_option("--lambda", rec.lambda, "Penalty weight (penalized mode)");
  c_rec->add_option("--backend", rec.backend, "auto | lp | split")->capture_default_str();
  c_rec->add_option("--max-iterations", rec.max_iterations, "Splitting iteration cap")
      ->capture_default_str();
  c_rec->add_option("--out", rec.out, "Write the result JSON here");

  CertifyArgs cer;
  auto* c_cer = app.add_subcommand("certify", "Compute a (gamma, beta) certificate");
  c_cer->add_option("--problem", cer.problem, "Problem JSON (structure, A, phi)");
  c_cer->add_option("--structure", cer.structure, "Structure JSON");
  c_cer->add_option("--matrix", cer.matrix, "Sensing matrix CSV");
  c_cer->add_option("--s", cer.s, "Sparsity level")->required();
  c_cer->add_option("--method", cer.method, "column-lp | bruteforce | ubar | ustar");
  c_cer->add_option("--phi", cer.phi, "Noise norm: l1 | l2 | linf");
  c_cer->add_option("--out", cer.out, "Write the certificate JSON here");
  c_cer->add_flag("--with-matrices", cer.with_matrices, "Include H and W");

  NullspaceArgs nul;
  auto* c_nul = app.add_subcommand("nullspace", "Brute-force nullspace property check");
  c_nul->add_option("--problem", nul.problem, "Problem JSON (structure, A)");
  c_nul->add_option("--structure", nul.structure, "Structure JSON");
  c_nul->add_option("--matrix", nul.matrix, "Sensing matrix CSV");
  c_nul->add_option("--s", nul.s, "Sparsity level")->required();
  c_nul->add_option("--max-lps", nul.max_lps, "LP budget")->capture_default_str();

  BoundArgs bnd;
  auto* c_bnd = app.add_subcommand("bound", "Evaluate the closed-form error bound");
  c_bnd->add_option("--gamma", bnd.gamma, "Certificate gamma, must be < 1")->required();
  c_bnd->add_option("--beta", bnd.beta, "Certificate beta")->required();
  c_bnd->add_option("--mode", bnd.mode, "regular | penalized")->capture_default_str();
  c_bnd->add_option("--epsilon", bnd.budget.epsilon, "Noise radius");
  c_bnd->add_option("--delta-x", bnd.budget.delta_x, "Distance of x to the nearest s-sparse signal");
  c_bnd->add_option("--delta-phi", bnd.budget.delta_phi, "Excess of the residual over epsilon");
  c_bnd->add_option("--delta", bnd.budget.delta, "Optimality gap of the computed solution");
  c_bnd->add_option("--lambda", bnd.budget.lambda, "Penalty weight (penalized mode)");
  c_bnd->add_option("--phi-xi", bnd.budget.phi_xi, "Noise norm phi(xi) (penalized mode)");

  ExperimentArgs exa;
  auto* c_exp = app.add_subcommand("experiment", "Randomized bound-versus-error trials");
  c_exp->add_option("--config", exa.config, "Experiment config JSON")->required();
  c_exp->add_option("--csv", exa.csv, "Write the per-trial CSV here");
  c_exp->add_option("--summary", exa.summary, "Write the summary JSON here");

  AxiomArgs axa;
  auto* c_axi = app.add_subcommand("axioms", "Randomized verification of the structure axioms");
  c_axi->add_option("--structure", axa.structure, "Structure JSON")->required();
  c_axi->add_option("--trials", axa.trials, "Random trials per check")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*c_rec) return cmd_recover(rec, g, out);
    if (*c_cer) return cmd_certify(cer, g, out);
    if (*c_nul) return cmd_nullspace(nul, g, out);
    if (*c_bnd) return cmd_bound(bnd, g, out);
    if (*c_exp) return cmd_experiment(exa, g, out, err);
    if (*c_axi) return cmd_axioms(axa, g, out);
  } catch (const Unsupported& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const GammaTooLarge& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotCertified;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace structrec
