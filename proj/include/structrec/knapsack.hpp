#pragma once

#include <vector>

namespace structrec {

/// max sum_{l in I} value_l  s.t.  sum_{l in I} weight_l <= capacity, values >= 0.
struct KnapsackResult {
  double value = 0.0;
  std::vector<int> chosen;  // sorted
  bool exact = true;
};

enum class KnapsackMethod {
  Auto,            // DP for integer weights, branch-and-bound for <= 25 items, else greedy
  Exact,           // DP or branch-and-bound; throws Unsupported when neither applies
  Greedy,          // ratio order, skipping items that no longer fit
};

KnapsackResult knapsack_max(const std::vector<double>& values, const std::vector<double>& weights,
                            double capacity, KnapsackMethod method = KnapsackMethod::Auto);

/// Continuous relaxation with 0 <= eta_l <= min(1, floor(capacity / weight_l)).
double knapsack_relaxed(const std::vector<double>& values, const std::vector<double>& weights,
                        double capacity);

bool all_integer(const std::vector<double>& weights);

inline constexpr int kMaxBranchAndBoundItems = 25;

}  // namespace structrec
