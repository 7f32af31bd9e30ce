#include "structrec/lp.hpp"

namespace structrec {

int LpBuilder::add_variable(double lower, double upper, double cost) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return static_cast<int>(cost_.size()) - 1;
}

int LpBuilder::add_variables(int count, double lower, double upper, double cost) {
  const int first = num_variables();
  for (int i = 0; i < count; ++i) add_variable(lower, upper, cost);
  return first;
}

void LpBuilder::set_cost(int var, double cost) { cost_.at(var) = cost; }

void LpBuilder::add_row(const std::vector<std::pair<int, double>>& entries, RowSense sense,
                        double rhs) {
  rows_.push_back(entries);
  senses_.push_back(sense);
  rhs_.push_back(rhs);
}

LinearProgram LpBuilder::build() const {
  LinearProgram lp;
  const int n = num_variables();
  const int m = num_rows();
  lp.c = Eigen::Map<const Vector>(cost_.data(), n);
  lp.lower = Eigen::Map<const Vector>(lower_.data(), n);
  lp.upper = Eigen::Map<const Vector>(upper_.data(), n);
  lp.G = Matrix::Zero(m, n);
  for (int i = 0; i < m; ++i)
    for (const auto& [j, v] : rows_[i]) lp.G(i, j) += v;
  lp.h = Eigen::Map<const Vector>(rhs_.data(), m);
  lp.senses = senses_;
  return lp;
}

}  // namespace structrec
