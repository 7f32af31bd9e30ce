#pragma once

// Certificates (gamma, beta) for the condition
//
//   C_s(gamma, beta; phi):  ||P B z|| + ||B z|| - ||P̄ B z|| <= beta phi(A z) + gamma ||B z||
//                           for all z in X and all P of weight <= s,
//
// brute-force nullspace oracles for small instances, and the verifiable
// sufficient conditions B = W B + H^T A with bounds on W (column LP for plain
// and group structures, Theta-relaxations for low rank).

#include "structrec/lowrank.hpp"
#include "structrec/lp.hpp"
#include "structrec/structures.hpp"
#include "structrec/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace structrec {

enum class CertMethod { BruteForce, ColumnLP, LowRankUBar, LowRankUStar };
std::string to_string(CertMethod method);
CertMethod cert_method_from_string(std::string_view name);

struct Certificate {
  double gamma = 0.0;
  double beta = 0.0;
  double s = 0.0;
  NormTag phi = NormTag::L1;
  CertMethod method = CertMethod::ColumnLP;
  Matrix H;  // m x dim(E); empty for brute force
  Matrix W;  // dim(E) x dim(E); empty for brute force
  bool valid = false;       // gamma < 1
  bool beta_exact = true;   // false when beta is an upper bound from a fallback
  bool gamma_exact = true;  // false when gamma is an upper bound (inexact induced norms)
  double gamma_bar = 0.0;   // low rank: value of the coarser relaxation
  std::vector<std::string> notes;
};

enum class Verdict { CertifiedGood, CertifiedBad, Unknown };
std::string to_string(Verdict verdict);

struct NullspaceVerdict {
  Verdict status = Verdict::Unknown;
  /// Plain: gamma_s(A) = max { ||z||_{s,1} : z in Ker A, ||z||_1 <= 1 }.
  /// Group / low rank: max over z in Ker A, ||Bz|| = 1, of max_P ||P B z||.
  /// Exact values have lo == hi.
  double lo = 0.0;
  double hi = 0.0;
  Vector witness;  // maximizer (or best point found) in Ker A
  std::optional<ProjectorDesc> witness_projector;
  long lps_solved = 0;
  std::string note;
};

struct BruteForceOptions {
  long max_lps = 20000;
  int starts = 64;       // random starts for sampled ascent
  int ascent_steps = 300;
  std::uint64_t seed = 1;
};

/// Exact for plain structures and for group structures whose blocks are l1,
/// linf or scalar (budget permitting); sampled lower bracket otherwise.
/// CertifiedGood iff the exact value is < 1/2 - 1e-9.
NullspaceVerdict gamma_s_bruteforce(const Matrix& A, const SparsityStructure& structure, double s,
                                    const BruteForceOptions& options = {});

struct CsViolation {
  Vector z;
  ProjectorDesc projector;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Randomized search for a violation of C_s(gamma, beta; phi); half of the
/// draws lie in Ker A. Uses the worst projector for each draw.
std::optional<CsViolation> check_condition_Cs(const Matrix& A, const SparsityStructure& structure,
                                              double s, double gamma, double beta, NormTag phi,
                                              int trials, std::uint64_t seed);

struct SynthOptions {
  PivotRule rule = PivotRule::Dantzig;
  bool minimize_beta = true;  // second LP stage: smallest beta at (nearly) optimal gamma
};

/// Column-LP certificate for plain and group structures with phi = l1.
/// W = (B - H^T A) B^+ so that B = W B + H^T A holds exactly; gamma is the
/// exact max over columns of pi_s(Col_l(Omega[W])) at the LP solution and
/// beta = psi_s(H).
Certificate synth_certificate_group(const Matrix& A, const SparsityStructure& structure, double s,
                                    NormTag phi, const SynthOptions& options = {});

/// max over phi(v) <= 1 of ||H^T v||_{P_s}; phi = l1 only (extreme points e_i).
double psi_s(const Matrix& H, const SparsityStructure& structure, double s, NormTag phi);

/// gamma from the exact nullspace value and beta from per-pattern LPs:
/// beta = max { ||Bz||_{P_s} - gamma ||Bz|| : phi(Az) <= 1 }. Plain and
/// polyhedral group structures, phi in {l1, linf}. target_gamma < 0 picks the
/// midpoint between 2 gamma_s and 1.
Certificate bruteforce_certificate(const Matrix& A, const SparsityStructure& structure, double s,
                                   NormTag phi, double target_gamma = -1.0,
                                   const BruteForceOptions& options = {});

struct LowRankOptions {
  bool use_opt_star = true;
  OptStarOptions opt_star;
  bool polish_h = false;  // 50 subgradient steps on H (off by default)
  int polish_steps = 50;
  bool allow_inexact_beta = false;  // phi != l1: Frobenius-based upper bound
  std::vector<Matrix> extra_candidates;
};

/// Candidates H = (A^+)^T and H = c A with c = argmin ||I - c A^T A||_F plus
/// any extra candidates; W = I - H^T A. Returns the certificate with the
/// smallest gamma.
Certificate certify_lowrank(const Matrix& A, const SparsityStructure& structure, int s,
                            NormTag phi, const LowRankOptions& options = {});

/// max_i Sigma_s(H^T e_i) + Sigma_2s(H^T e_i) for phi = l1.
double lowrank_beta(const Matrix& H, int p, int q, int s);

}  // namespace structrec
