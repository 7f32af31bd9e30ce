#include "cli.hpp"
#include "structrec/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace structrec;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "structrec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("structrec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const Json& doc) {
    const fs::path p = dir_ / name;
    save_json(p, doc);
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string plain_problem(const Json& a, const Json& y, double epsilon = 0.0, const std::string& phi = "l2") {
    const int n = static_cast<int>(a[0].size());
    return write("problem.json", {{"structure", {{"kind", "plain"}, {"n", n}}},
                                  {"A", a},
                                  {"y", y},
                                  {"phi", phi},
                                  {"epsilon", epsilon}});
  }

  Json experiment_config(int trials) const {
    return {{"structure", {{"kind", "plain"}, {"n", 8}}},
            {"sensing", {{"kind", "gaussian"}, {"m", 6}, {"seed", 11}}},
            {"signal", {{"s", 1}, {"magnitude", "gaussian"}, {"seed", 12}}},
            {"noise", {{"epsilon_max", 0.2}, {"law", "ball"}, {"seed", 13}}},
            {"phi", "l1"},
            {"modes", {"regular", "penalized"}},
            {"trials", trials}};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, RecoverExample) {
  const std::string p = plain_problem({{1, 0, 1}, {0, 1, 1}}, {2, 0});
  const CliRun r = run({"recover", "--problem", p, "--mode", "regular", "--out", path("x.json")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const Json doc = load_json(path("x.json"));
  const Vector x = vector_from_json(doc["x_hat"]);
  ASSERT_EQ(x.size(), 3);
  EXPECT_NEAR(x(0), 2.0, 1e-6);
  EXPECT_NEAR(x(1), 0.0, 1e-6);
  EXPECT_NEAR(x(2), 0.0, 1e-6);
  EXPECT_NE(r.out.find("x_hat:"), std::string::npos);
}

TEST_F(Cli, RecoverPenalizedAndErrors) {
  const std::string p = plain_problem({{1, 0, 1}, {0, 1, 1}}, {2, 0});
  EXPECT_EQ(run({"recover", "--problem", p, "--mode", "penalized", "--lambda", "2"}).code, kExitOk);
  EXPECT_EQ(run({"recover", "--problem", p, "--mode", "penalized"}).code, kExitInput);
  EXPECT_EQ(run({"recover", "--problem", path("nope.json")}).code, kExitInput);
  EXPECT_EQ(run({"recover"}).code, kExitInput);
  EXPECT_EQ(run({}).code, kExitInput);
}

TEST_F(Cli, RecoverInfeasible) {
  const std::string p = plain_problem({{1}, {1}}, {1, -1}, 0.5, "l2");
  EXPECT_EQ(run({"recover", "--problem", p, "--backend", "lp"}).code, kExitUnsupported);
  EXPECT_EQ(run({"recover", "--problem", p}).code, kExitInfeasible);
  const std::string q = plain_problem({{1}, {1}}, {1, -1}, 0.5, "linf");
  EXPECT_EQ(run({"recover", "--problem", q, "--backend", "lp"}).code, kExitInfeasible);
}

TEST_F(Cli, CertifyExitCodes) {
  const std::string id = plain_problem({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0, 0, 0}, 0.0, "l1");
  CliRun r = run({"--json", "certify", "--problem", id, "--s", "1", "--out", path("cert.json")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Json::parse(r.out)["gamma"], 0.0);

  const std::string zero = plain_problem({{0, 0, 0}}, {0}, 0.0, "l1");
  EXPECT_EQ(run({"certify", "--problem", zero, "--s", "1"}).code, kExitNotCertified);
  EXPECT_EQ(run({"certify", "--problem", id, "--s", "1", "--phi", "l2"}).code, kExitUnsupported);
  EXPECT_EQ(run({"certify", "--problem", id, "--s", "1", "--method", "magic"}).code, kExitInput);
}

TEST_F(Cli, CertificateFileRoundTrips) {
  const std::string p = plain_problem({{1, 0, 1, 2}, {0, 1, 1, -1}, {1, 1, 0, 1}}, {0, 0, 0}, 0.0, "l1");
  const CliRun r = run({"certify", "--problem", p, "--s", "1", "--with-matrices", "--out", path("c.json")});
  ASSERT_TRUE(r.code == kExitOk || r.code == kExitNotCertified) << r.err;
  const Json doc = load_json(path("c.json"));
  EXPECT_EQ(certificate_to_json(certificate_from_json(doc), true), doc);
  EXPECT_TRUE(doc.contains("H"));
  EXPECT_TRUE(doc.contains("W"));
}

TEST_F(Cli, CertifyLowRankStar) {
  const std::string st = write("st.json", {{"kind", "lowrank"}, {"p", 2}, {"q", 3}});
  Matrix a(5, 6);
  a << 1, 0, 2, 0, 1, 0, 0, 1, 0, 1, 0, 2, 3, 0, 1, 1, 0, 0, 0, 2, 0, 0, 1, 1, 1, 1, 1, 0, 0, 1;
  write_matrix_csv(path("a.csv"), a);
  const CliRun r = run({"--json", "certify", "--structure", st, "--matrix", path("a.csv"), "--s", "1",
                     "--method", "ustar"});
  ASSERT_TRUE(r.code == kExitOk || r.code == kExitNotCertified) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["method"], "ustar");
  EXPECT_LE(real_from_json(doc["gamma"]), real_from_json(doc["gamma_bar"]) + 1e-6);
}

TEST_F(Cli, Nullspace) {
  const std::string good = plain_problem({{1, 0, 1}, {0, 1, 1}}, {0, 0});
  CliRun r = run({"--json", "nullspace", "--problem", good, "--s", "1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NEAR(real_from_json(Json::parse(r.out)["gamma_s_hi"]), 1.0 / 3.0, 1e-12);
  const std::string ones = plain_problem({{1, 1, 1}}, {0});
  r = run({"--json", "nullspace", "--problem", ones, "--s", "1"});
  EXPECT_EQ(r.code, kExitNotCertified);
  EXPECT_EQ(Json::parse(r.out)["status"], "certified_bad");
}

TEST_F(Cli, Bound) {
  CliRun r = run({"--json", "bound", "--gamma", "0.5", "--beta", "1", "--epsilon", "0.1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NEAR(real_from_json(Json::parse(r.out)["bound"]), 0.4, 1e-15);
  EXPECT_EQ(run({"bound", "--gamma", "1.2", "--beta", "1"}).code, kExitNotCertified);
  EXPECT_EQ(run({"bound", "--gamma", "0.5", "--beta", "2", "--mode", "penalized", "--lambda", "1"}).code,
            kExitNotCertified);
}

TEST_F(Cli, ExperimentIsDeterministic) {
  const std::string cfg = write("exp.json", experiment_config(12));
  const CliRun a = run({"--threads", "1", "experiment", "--config", cfg, "--csv", path("a.csv"), "--summary",
                     path("a.json")});
  ASSERT_EQ(a.code, kExitOk) << a.out << a.err;
  const CliRun b = run({"--threads", "3", "experiment", "--config", cfg, "--csv", path("b.csv"), "--summary",
                     path("b.json")});
  ASSERT_EQ(b.code, kExitOk);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  std::istringstream lines(slurp(path("a.csv")));
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "trial,mode,s,epsilon,gamma,beta,error,bound,margin");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 24);
}

TEST_F(Cli, ExperimentSchemaViolations) {
  EXPECT_EQ(run({"experiment", "--config", write("zero.json", experiment_config(0))}).code, kExitInput);
  Json noseed = experiment_config(3);
  noseed["signal"].erase("seed");
  EXPECT_EQ(run({"experiment", "--config", write("noseed.json", noseed)}).code, kExitInput);
  Json badlaw = experiment_config(3);
  badlaw["noise"]["law"] = "cauchy";
  EXPECT_EQ(run({"experiment", "--config", write("badlaw.json", badlaw)}).code, kExitInput);
}

TEST_F(Cli, Axioms) {
  const std::string st = write("st.json", {{"kind", "lowrank"}, {"p", 3}, {"q", 2}});
  CliRun r = run({"--json", "axioms", "--structure", st, "--trials", "200"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_TRUE(Json::parse(r.out)["ok"].get<bool>());
  EXPECT_EQ(run({"axioms", "--structure", st, "--trials", "0"}).code, kExitInput);
}
