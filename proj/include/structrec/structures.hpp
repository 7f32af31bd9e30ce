#pragma once

// Sparsity structures: a norm on the representation space E together with a
// weighted family of projectors P and complements P̄ such that
//   P^2 = P,  P̄ P = 0,  ||P* f + P̄* g||_* <= max(||f||_*, ||g||_*).
// Three instances are provided: entrywise sparsity (plain), weighted block
// sparsity with possibly overlapping blocks (group), and low rank.

#include "structrec/rng.hpp"
#include "structrec/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace structrec {

enum class StructureKind { Plain, Group, LowRank };

std::string to_string(StructureKind kind);

struct GroupParams {
  int n = 0;
  std::vector<std::vector<int>> blocks;  // 0-based indices into {0..n-1}
  std::vector<double> weights;           // chi_l > 0
  std::vector<NormTag> norms;            // L1 | L2 | LInf per block
};

class SparsityStructure {
 public:
  static SparsityStructure plain(int n);
  static SparsityStructure group(GroupParams params);
  /// p < q is accepted and stored transposed (p >= q internally).
  static SparsityStructure lowrank(int p, int q);

  /// Group with singleton blocks, unit weights and L1 block norms; the plain
  /// structure expressed as a group structure.
  static SparsityStructure singleton_groups(int n);

  StructureKind kind() const { return kind_; }
  int dim_x() const { return dim_x_; }
  int dim_e() const { return dim_e_; }

  // group
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<int>& block(int l) const { return blocks_.at(l); }
  int block_offset(int l) const { return offsets_.at(l); }
  int block_size(int l) const { return static_cast<int>(blocks_.at(l).size()); }
  double weight(int l) const { return weights_.at(l); }
  NormTag block_norm(int l) const { return norms_.at(l); }
  const std::vector<double>& weights() const { return weights_; }
  bool integer_weights() const;

  // low rank (p >= q)
  int rows() const { return p_; }
  int cols() const { return q_; }
  bool transposed() const { return transposed_; }

  /// Largest projector weight in the family: n, sum of chi, or q.
  double full_weight() const;

  /// Block norm vector [||w^1||_(1); ...; ||w^K||_(K)] (group only).
  Vector block_norms(const Vector& w) const;

  void check_e(const Vector& w) const;
  void check_x(const Vector& x) const;

 private:
  StructureKind kind_ = StructureKind::Plain;
  int dim_x_ = 0;
  int dim_e_ = 0;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> offsets_;
  std::vector<double> weights_;
  std::vector<NormTag> norms_;
  int p_ = 0;
  int q_ = 0;
  bool transposed_ = false;
};

/// Dense matrix of B : X -> E.
struct RepresentationMap {
  Matrix B;
  bool identity = true;

  Vector apply(const Vector& x) const { return identity ? x : Vector(B * x); }
};

RepresentationMap representation_map(const SparsityStructure& structure);

/// Validates and returns the structure with its canonical representation map.
std::pair<SparsityStructure, RepresentationMap> build_structure(const SparsityStructure& s);

// Projectors ---------------------------------------------------------------

struct SupportProjector {
  std::vector<int> support;
};
struct BlockProjector {
  std::vector<int> blocks;
};
/// P(x) = L L^T x R R^T with orthonormal columns in L (p x r_L), R (q x r_R).
struct SubspaceProjector {
  Matrix left;
  Matrix right;
};

using ProjectorDesc = std::variant<SupportProjector, BlockProjector, SubspaceProjector>;

enum class ProjectSide { Direct, Complement };

double projector_weight(const SparsityStructure& structure, const ProjectorDesc& p);

/// Applies P or P̄. For the low-rank structure P̄ is (I - L L^T) x (I - R R^T),
/// which is not Id - P.
Vector project(const SparsityStructure& structure, const ProjectorDesc& p, const Vector& w,
               ProjectSide side);

/// Inclusion-maximal projectors of weight <= s; nullopt for the low-rank
/// family, which is continuous.
std::optional<std::vector<ProjectorDesc>> enumerate_projectors(const SparsityStructure& structure,
                                                               double s);

struct SparseApprox {
  ProjectorDesc projector;
  double delta_x = 0.0;  // ||w - P w|| in the structure norm
  bool exact = true;     // false when delta_x is only an upper bound
};

SparseApprox best_sparse_approx(const SparsityStructure& structure, const Vector& w, double s);

/// Random member of the family; max_weight < 0 means unrestricted.
ProjectorDesc random_projector(const SparsityStructure& structure, Rng& rng,
                               double max_weight = -1.0);

// Axiom verification -------------------------------------------------------

struct AxiomWitness {
  ProjectorDesc projector;
  Vector f;
  Vector g;
};

struct AxiomCheck {
  double worst_margin = 0.0;
  int violations = 0;
  std::optional<AxiomWitness> witness;  // first violation
};

struct AxiomReport {
  int trials = 0;
  AxiomCheck idempotent;        // P^2 = P
  AxiomCheck annihilates;       // P̄ P = 0
  AxiomCheck dual_contraction;  // ||P* f + P̄* g||_* <= max(||f||_*, ||g||_*)
  bool ok() const {
    return idempotent.violations == 0 && annihilates.violations == 0 &&
           dual_contraction.violations == 0;
  }
};

using ComplementMap = std::function<Vector(const ProjectorDesc&, const Vector&)>;

struct AxiomOptions {
  double tol = 1e-9;
  /// Replaces P̄ (and P̄*) for fault-injection; must be self-adjoint.
  ComplementMap complement_override;
};

AxiomReport verify_axioms(const SparsityStructure& structure, int trials, std::uint64_t seed,
                          const AxiomOptions& options = {});

/// ||w + Bz|| - (||w|| + ||P̄Bz|| - ||PBz||) over random (w, z, P) with Pw = w.
/// The check is the inequality behind exact recovery; worst_margin >= -tol.
AxiomCheck verify_nullspace_inequality(const SparsityStructure& structure, int trials,
                                       std::uint64_t seed, double tol = 1e-9);

}  // namespace structrec
