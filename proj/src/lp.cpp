#include "structrec/lp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <random>

namespace structrec {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "?";
}

void LinearProgram::validate() const {
  const Eigen::Index n = c.size();
  const Eigen::Index m = h.size();
  if (G.rows() != m || G.cols() != n || lower.size() != n || upper.size() != n ||
      static_cast<Eigen::Index>(senses.size()) != m)
    throw DimensionMismatch("LinearProgram: inconsistent dimensions");
  if (!c.allFinite() || !G.allFinite() || !h.allFinite())
    throw Error("LinearProgram: objective, constraints and right-hand side must be finite");
  for (Eigen::Index j = 0; j < n; ++j)
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) == kInf || upper(j) == -kInf)
      throw Error("LinearProgram: invalid variable bounds");
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class VarKind { Shift, Mirror, Split };

struct VarMap {
  VarKind kind;
  int col;
  double offset;
};

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) { build(); }

  LpSolution run();

 private:
  void build();
  // Returns Optimal, Unbounded or MaxIter; sets entering_ on Unbounded.
  SolveStatus iterate(const Vector& cost, bool allow_artificial);
  void pivot(int row, int col);
  void price(const Vector& cost);
  Vector basic_solution() const;
  Vector to_original(const Vector& xs) const;
  Vector basis_duals(const Vector& cost) const;
  void finish_optimal(LpSolution& sol);

  const LinearProgram& lp_;
  LpOptions opt_;

  int m0_ = 0;       // original rows
  int rows_ = 0;     // standard-form rows
  int n_struct_ = 0;
  int n_slack_ = 0;
  int n_art_ = 0;
  int ncol_ = 0;
  std::vector<VarMap> map_;
  std::vector<double> sign_;  // row sign applied to reach b >= 0
  Matrix a_;                  // standard-form matrix incl. slacks and artificials
  Vector b_;                  // right-hand side driving the pivots (perturbed)
  Vector b_exact_;            // unperturbed right-hand side, same row signs as b_
  Vector c2_;
  Vector c1_;
  RowMatrix t_;               // tableau, last row = reduced costs, last col = rhs
  std::vector<int> basis_;
  std::vector<bool> is_basic_;
  int iterations_ = 0;
  int degenerate_run_ = 0;
  int entering_ = -1;
  double constant_ = 0.0;     // objective offset from variable shifts
  bool infeasible_bounds_ = false;
};

void Simplex::build() {
  const int n = static_cast<int>(lp_.c.size());
  m0_ = static_cast<int>(lp_.h.size());
  map_.resize(n);
  std::vector<std::pair<int, double>> box_rows;  // (col, width)
  int col = 0;
  for (int j = 0; j < n; ++j) {
    const double lo = lp_.lower(j);
    const double hi = lp_.upper(j);
    if (lo > hi) infeasible_bounds_ = true;
    if (std::isfinite(lo)) {
      map_[j] = {VarKind::Shift, col++, lo};
      if (std::isfinite(hi)) box_rows.emplace_back(map_[j].col, std::max(0.0, hi - lo));
    } else if (std::isfinite(hi)) {
      map_[j] = {VarKind::Mirror, col++, hi};
    } else {
      map_[j] = {VarKind::Split, col, 0.0};
      col += 2;
    }
  }
  n_struct_ = col;
  rows_ = m0_ + static_cast<int>(box_rows.size());

  Matrix as = Matrix::Zero(rows_, n_struct_);
  Vector bs(rows_);
  std::vector<RowSense> senses(rows_, RowSense::LessEqual);
  for (int i = 0; i < m0_; ++i) {
    double rhs = lp_.h(i);
    for (int j = 0; j < n; ++j) {
      const double g = lp_.G(i, j);
      if (g == 0.0) continue;
      const VarMap& vm = map_[j];
      switch (vm.kind) {
        case VarKind::Shift: as(i, vm.col) += g; rhs -= g * vm.offset; break;
        case VarKind::Mirror: as(i, vm.col) -= g; rhs -= g * vm.offset; break;
        case VarKind::Split: as(i, vm.col) += g; as(i, vm.col + 1) -= g; break;
      }
    }
    bs(i) = rhs;
    senses[i] = lp_.senses[i];
  }
  for (std::size_t k = 0; k < box_rows.size(); ++k) {
    as(m0_ + k, box_rows[k].first) = 1.0;
    bs(m0_ + k) = box_rows[k].second;
  }
  // Relax every inequality by a small distinct amount so that ties in the
  // ratio test become rare. Equality rows stay exact, so redundant equalities
  // remain consistent. The reported point is recomputed from the exact data.
  Vector exact = bs;
  if (opt_.perturbation > 0) {
    std::mt19937_64 gen(0x5eedULL);
    std::uniform_real_distribution<double> unif(0.5, 1.0);
    for (int i = 0; i < rows_; ++i) {
      if (senses[i] == RowSense::Equal) continue;
      const double d = opt_.perturbation * (1.0 + std::abs(bs(i))) * unif(gen);
      bs(i) += senses[i] == RowSense::LessEqual ? d : -d;
    }
  }

  c2_ = Vector::Zero(n_struct_);
  for (int j = 0; j < n; ++j) {
    const VarMap& vm = map_[j];
    const double cj = lp_.c(j);
    switch (vm.kind) {
      case VarKind::Shift: c2_(vm.col) += cj; constant_ += cj * vm.offset; break;
      case VarKind::Mirror: c2_(vm.col) -= cj; constant_ += cj * vm.offset; break;
      case VarKind::Split: c2_(vm.col) += cj; c2_(vm.col + 1) -= cj; break;
    }
  }

  // Slacks, sign normalization, artificials.
  std::vector<double> slack_coef(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    if (senses[i] == RowSense::LessEqual) slack_coef[i] = 1.0;
    if (senses[i] == RowSense::GreaterEqual) slack_coef[i] = -1.0;
    if (slack_coef[i] != 0.0) ++n_slack_;
  }
  sign_.assign(rows_, 1.0);
  for (int i = 0; i < rows_; ++i) {
    if (bs(i) < 0) {
      sign_[i] = -1.0;
      as.row(i) *= -1.0;
      bs(i) = -bs(i);
      exact(i) = -exact(i);
      slack_coef[i] = -slack_coef[i];
    }
  }
  std::vector<int> needs_art;
  for (int i = 0; i < rows_; ++i)
    if (slack_coef[i] != 1.0) needs_art.push_back(i);
  n_art_ = static_cast<int>(needs_art.size());
  ncol_ = n_struct_ + n_slack_ + n_art_;

  a_ = Matrix::Zero(rows_, ncol_);
  a_.leftCols(n_struct_) = as;
  b_ = bs;
  b_exact_ = exact;
  basis_.assign(rows_, -1);
  int s = n_struct_;
  for (int i = 0; i < rows_; ++i) {
    if (slack_coef[i] == 0.0) continue;
    a_(i, s) = slack_coef[i];
    if (slack_coef[i] == 1.0) basis_[i] = s;
    ++s;
  }
  int a = n_struct_ + n_slack_;
  for (int i : needs_art) {
    a_(i, a) = 1.0;
    basis_[i] = a++;
  }
  c2_.conservativeResize(ncol_);
  c2_.tail(ncol_ - n_struct_).setZero();
  c1_ = Vector::Zero(ncol_);
  c1_.tail(n_art_).setOnes();

  t_ = Matrix::Zero(rows_ + 1, ncol_ + 1);
  t_.topLeftCorner(rows_, ncol_) = a_;
  t_.topRightCorner(rows_, 1) = b_;
  is_basic_.assign(ncol_, false);
  for (int i = 0; i < rows_; ++i) is_basic_[basis_[i]] = true;
}

void Simplex::price(const Vector& cost) {
  Vector cb(rows_);
  for (int i = 0; i < rows_; ++i) cb(i) = cost(basis_[i]);
  t_.row(rows_).head(ncol_) = cost.transpose() - cb.transpose() * t_.topLeftCorner(rows_, ncol_);
  t_(rows_, ncol_) = -cb.dot(t_.topRightCorner(rows_, 1).col(0));
  for (int i = 0; i < rows_; ++i) t_(rows_, basis_[i]) = 0.0;
}

void Simplex::pivot(int row, int col) {
  t_.row(row) /= t_(row, col);
  t_(row, col) = 1.0;
  for (int i = 0; i <= rows_; ++i) {
    if (i == row) continue;
    const double f = t_(i, col);
    if (f == 0.0) continue;
    t_.row(i) -= f * t_.row(row);
    t_(i, col) = 0.0;
  }
  is_basic_[basis_[row]] = false;
  basis_[row] = col;
  is_basic_[col] = true;
}

SolveStatus Simplex::iterate(const Vector& cost, bool allow_artificial) {
  price(cost);
  const int limit = allow_artificial ? ncol_ : n_struct_ + n_slack_;
  const double dtol = opt_.pivot_tol * std::max(1.0, cost.lpNorm<Eigen::Infinity>());
  bool bland = opt_.rule == PivotRule::Bland;
  while (true) {
    if (iterations_ >= opt_.max_iterations) return SolveStatus::MaxIter;
    int enter = -1;
    double best = -dtol;
    for (int j = 0; j < limit; ++j) {
      if (is_basic_[j]) continue;
      const double d = t_(rows_, j);
      if (d < -dtol) {
        if (bland) {
          enter = j;
          break;
        }
        if (d < best) {
          best = d;
          enter = j;
        }
      }
    }
    if (enter < 0) return SolveStatus::Optimal;

    int leave = -1;
    double min_ratio = kInf;
    for (int i = 0; i < rows_; ++i) {
      const double a = t_(i, enter);
      if (a <= opt_.pivot_tol) continue;
      const double ratio = std::max(0.0, t_(i, ncol_)) / a;
      if (leave < 0 || ratio < min_ratio - 1e-12 * (1.0 + min_ratio)) {
        leave = i;
        min_ratio = ratio;
      } else if (ratio <= min_ratio + 1e-12 * (1.0 + min_ratio)) {
        const bool take = bland ? basis_[i] < basis_[leave] : a > t_(leave, enter);
        if (take) {
          leave = i;
          min_ratio = std::min(min_ratio, ratio);
        }
      }
    }
    if (leave < 0) {
      entering_ = enter;
      return SolveStatus::Unbounded;
    }
    const bool degenerate = min_ratio <= 1e-12;
    pivot(leave, enter);
    ++iterations_;
    if (opt_.rule == PivotRule::Dantzig) {
      degenerate_run_ = degenerate ? degenerate_run_ + 1 : 0;
      bland = degenerate_run_ > 50;
    }
  }
}

Vector Simplex::basic_solution() const {
  Vector xs = Vector::Zero(ncol_);
  for (int i = 0; i < rows_; ++i) xs(basis_[i]) = t_(i, ncol_);
  return xs;
}

Vector Simplex::to_original(const Vector& xs) const {
  const int n = static_cast<int>(map_.size());
  Vector x(n);
  for (int j = 0; j < n; ++j) {
    const VarMap& vm = map_[j];
    switch (vm.kind) {
      case VarKind::Shift: x(j) = vm.offset + xs(vm.col); break;
      case VarKind::Mirror: x(j) = vm.offset - xs(vm.col); break;
      case VarKind::Split: x(j) = xs(vm.col) - xs(vm.col + 1); break;
    }
  }
  return x;
}

Vector Simplex::basis_duals(const Vector& cost) const {
  Matrix bm(rows_, rows_);
  Vector cb(rows_);
  for (int i = 0; i < rows_; ++i) {
    bm.col(i) = a_.col(basis_[i]);
    cb(i) = cost(basis_[i]);
  }
  return Eigen::PartialPivLU<Matrix>(bm.transpose()).solve(cb);
}

void Simplex::finish_optimal(LpSolution& sol) {
  Matrix bm(rows_, rows_);
  Vector cb(rows_);
  for (int i = 0; i < rows_; ++i) {
    bm.col(i) = a_.col(basis_[i]);
    cb(i) = c2_(basis_[i]);
  }
  Eigen::PartialPivLU<Matrix> lu(bm);
  Vector xb = lu.solve(b_exact_);
  Vector xs = Vector::Zero(ncol_);
  const double guard = 1e-7 * (1.0 + b_exact_.lpNorm<Eigen::Infinity>());
  if (!xb.allFinite() || xb.minCoeff() < -guard) {
    xs = basic_solution();
  } else {
    for (int i = 0; i < rows_; ++i) xs(basis_[i]) = std::max(0.0, xb(i));
  }
  const Vector ystd = Eigen::PartialPivLU<Matrix>(bm.transpose()).solve(cb);

  sol.x = to_original(xs);
  sol.row_duals.resize(m0_);
  for (int i = 0; i < m0_; ++i) sol.row_duals(i) = sign_[i] * ystd(i);
  sol.reduced_costs = lp_.c - lp_.G.transpose() * sol.row_duals;
  sol.report.objective = lp_.c.dot(sol.x);

  double dual_obj = sol.row_duals.dot(lp_.h);
  double dres = 0.0;
  for (Eigen::Index j = 0; j < sol.x.size(); ++j) {
    const double r = sol.reduced_costs(j);
    const double lo = lp_.lower(j);
    const double hi = lp_.upper(j);
    if (r >= 0) {
      if (std::isfinite(lo)) dual_obj += r * lo;
      else { dual_obj += r * sol.x(j); dres = std::max(dres, r); }
    } else {
      if (std::isfinite(hi)) dual_obj += r * hi;
      else { dual_obj += r * sol.x(j); dres = std::max(dres, -r); }
    }
    const double gap = std::min(std::isfinite(lo) ? sol.x(j) - lo : kInf,
                                std::isfinite(hi) ? hi - sol.x(j) : kInf);
    if (std::isfinite(gap)) dres = std::max(dres, std::abs(r) * std::max(0.0, gap));
  }
  double pres = 0.0;
  const Vector gx = lp_.G * sol.x;
  for (int i = 0; i < m0_; ++i) {
    const double slack = gx(i) - lp_.h(i);
    const double y = sol.row_duals(i);
    switch (lp_.senses[i]) {
      case RowSense::LessEqual: pres = std::max(pres, slack); dres = std::max(dres, y); break;
      case RowSense::GreaterEqual: pres = std::max(pres, -slack); dres = std::max(dres, -y); break;
      case RowSense::Equal: pres = std::max(pres, std::abs(slack)); break;
    }
    dres = std::max(dres, std::abs(y * slack));
  }
  for (Eigen::Index j = 0; j < sol.x.size(); ++j) {
    if (std::isfinite(lp_.lower(j))) pres = std::max(pres, lp_.lower(j) - sol.x(j));
    if (std::isfinite(lp_.upper(j))) pres = std::max(pres, sol.x(j) - lp_.upper(j));
  }
  sol.dual_objective = dual_obj;
  sol.report.primal_residual = pres;
  sol.report.dual_residual = dres;
}

LpSolution Simplex::run() {
  LpSolution sol;
  const int n = static_cast<int>(lp_.c.size());
  if (infeasible_bounds_) {
    sol.report.status = SolveStatus::Infeasible;
    sol.certificate = Vector::Zero(m0_);
    sol.x = Vector::Zero(n);
    return sol;
  }

  if (n_art_ > 0) {
    const SolveStatus st1 = iterate(c1_, true);
    if (st1 == SolveStatus::MaxIter) {
      sol.report.status = SolveStatus::MaxIter;
      sol.report.iterations = iterations_;
      sol.x = to_original(basic_solution());
      return sol;
    }
    const double infeas = -t_(rows_, ncol_);
    if (infeas > opt_.feasibility_tol * std::max(1.0, b_.lpNorm<Eigen::Infinity>())) {
      const Vector y = basis_duals(c1_);
      sol.report.status = SolveStatus::Infeasible;
      sol.report.iterations = iterations_;
      sol.report.primal_residual = infeas;
      sol.certificate.resize(m0_);
      for (int i = 0; i < m0_; ++i) sol.certificate(i) = sign_[i] * y(i);
      sol.x = to_original(basic_solution());
      return sol;
    }
    // Drive artificials out of the basis where possible.
    const int first_art = n_struct_ + n_slack_;
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < first_art) continue;
      int best = -1;
      double mag = opt_.pivot_tol;
      for (int j = 0; j < first_art; ++j) {
        if (is_basic_[j]) continue;
        if (std::abs(t_(i, j)) > mag) {
          mag = std::abs(t_(i, j));
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
  }

  const SolveStatus st2 = iterate(c2_, false);
  sol.report.iterations = iterations_;
  if (st2 == SolveStatus::Unbounded) {
    Vector d = Vector::Zero(ncol_);
    d(entering_) = 1.0;
    for (int i = 0; i < rows_; ++i) d(basis_[i]) = -t_(i, entering_);
    // Ray in x-space: offsets do not apply to directions.
    Vector ray(n);
    for (int j = 0; j < n; ++j) {
      const VarMap& vm = map_[j];
      switch (vm.kind) {
        case VarKind::Shift: ray(j) = d(vm.col); break;
        case VarKind::Mirror: ray(j) = -d(vm.col); break;
        case VarKind::Split: ray(j) = d(vm.col) - d(vm.col + 1); break;
      }
    }
    sol.report.status = SolveStatus::Unbounded;
    sol.certificate = ray;
    sol.x = to_original(basic_solution());
    sol.report.objective = -kInf;
    return sol;
  }
  if (st2 == SolveStatus::MaxIter) {
    sol.report.status = SolveStatus::MaxIter;
    sol.x = to_original(basic_solution());
    sol.report.objective = lp_.c.dot(sol.x);
    return sol;
  }
  sol.report.status = SolveStatus::Optimal;
  finish_optimal(sol);
  return sol;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  Simplex simplex(lp, options);
  return simplex.run();
}

}  // namespace structrec
