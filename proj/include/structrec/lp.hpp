#pragma once

// Dense two-phase simplex for small linear programs
//
//   minimize c^T x  s.t.  G_i x {<=, =, >=} h_i,  lower <= x <= upper.
//
// Dantzig pricing; after a run of degenerate pivots the entering and leaving
// choices fall back to Bland's rule until progress resumes. Inequality
// right-hand sides are relaxed by tiny distinct amounts to make degenerate
// pivots rare. The final basis is re-solved from the original data with an
// LU factorization, which is where the reported primal and dual values come
// from.

#include "structrec/types.hpp"

#include <limits>
#include <string>
#include <vector>

namespace structrec {

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LinearProgram {
  Vector c;
  Matrix G;
  Vector h;
  std::vector<RowSense> senses;
  Vector lower;  // -inf allowed
  Vector upper;  // +inf allowed

  void validate() const;
};

enum class SolveStatus { Optimal, MaxIter, Infeasible, Unbounded };

std::string to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIter;
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool regularized = false;  // split solver only
};

enum class PivotRule {
  Dantzig,  // most negative reduced cost, Bland on degeneracy
  Bland,    // smallest index throughout
};

struct LpOptions {
  PivotRule rule = PivotRule::Dantzig;
  double pivot_tol = 1e-9;
  double feasibility_tol = 1e-9;
  int max_iterations = 500000;
  /// Relative relaxation of inequality right-hand sides used to break ties
  /// in the ratio test; 0 disables it.
  double perturbation = 1e-9;
};

struct LpSolution {
  Vector x;
  /// Multipliers y for the rows: c - G^T y is the reduced-cost vector, y_i <= 0
  /// on <= rows and >= 0 on >= rows.
  Vector row_duals;
  Vector reduced_costs;
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  /// Infeasible: row multipliers y with sup_{box} (G^T y)^T x < y^T h.
  /// Unbounded: a ray d in x-space with c^T d < 0 keeping every row and bound.
  Vector certificate;
  SolveReport report;
};

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Incremental construction of a LinearProgram with sparse row entries.
class LpBuilder {
 public:
  int add_variable(double lower = 0.0, double upper = kInf, double cost = 0.0);
  int add_variables(int count, double lower = 0.0, double upper = kInf, double cost = 0.0);
  void set_cost(int var, double cost);
  void add_row(const std::vector<std::pair<int, double>>& entries, RowSense sense, double rhs);

  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  LinearProgram build() const;

 private:
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<RowSense> senses_;
  std::vector<double> rhs_;
};

}  // namespace structrec
