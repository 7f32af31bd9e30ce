#include "structrec/knapsack.hpp"

#include "structrec/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace structrec {
namespace {

constexpr double kIntTol = 1e-12;
constexpr long kMaxDpCapacity = 2'000'000;

long floor_capacity(double capacity) {
  return static_cast<long>(std::floor(capacity + kIntTol));
}

KnapsackResult dynamic_program(const std::vector<double>& values,
                               const std::vector<double>& weights, double capacity) {
  const long cap = std::max(0L, floor_capacity(capacity));
  const std::size_t k = values.size();
  std::vector<long> w(k);
  for (std::size_t i = 0; i < k; ++i) w[i] = std::lround(weights[i]);

  std::vector<double> best(cap + 1, 0.0);
  std::vector<std::vector<bool>> take(k, std::vector<bool>(cap + 1, false));
  for (std::size_t i = 0; i < k; ++i) {
    if (w[i] > cap) continue;
    for (long c = cap; c >= w[i]; --c) {
      const double cand = best[c - w[i]] + values[i];
      if (cand > best[c]) {
        best[c] = cand;
        take[i][c] = true;
      }
    }
  }
  KnapsackResult out;
  out.value = best[cap];
  long c = cap;
  for (std::size_t i = k; i-- > 0;) {
    if (c >= 0 && take[i][c]) {
      out.chosen.push_back(static_cast<int>(i));
      c -= w[i];
    }
  }
  std::sort(out.chosen.begin(), out.chosen.end());
  return out;
}

struct BnbState {
  const std::vector<double>* values;
  const std::vector<double>* weights;
  std::vector<int> order;  // by value/weight, descending
  double best = -1.0;
  std::vector<int> best_set;
  std::vector<int> current;
};

double fractional_bound(const BnbState& st, std::size_t pos, double room) {
  double bound = 0.0;
  for (std::size_t t = pos; t < st.order.size() && room > 0; ++t) {
    const int i = st.order[t];
    const double w = (*st.weights)[i];
    if (w <= room) {
      bound += (*st.values)[i];
      room -= w;
    } else {
      bound += (*st.values)[i] * room / w;
      room = 0;
    }
  }
  return bound;
}

void branch(BnbState& st, std::size_t pos, double room, double acc) {
  if (acc > st.best) {
    st.best = acc;
    st.best_set = st.current;
  }
  if (pos == st.order.size()) return;
  if (acc + fractional_bound(st, pos, room) <= st.best + 1e-15) return;
  const int i = st.order[pos];
  const double w = (*st.weights)[i];
  if (w <= room + kIntTol) {
    st.current.push_back(i);
    branch(st, pos + 1, room - w, acc + (*st.values)[i]);
    st.current.pop_back();
  }
  branch(st, pos + 1, room, acc);
}

KnapsackResult branch_and_bound(const std::vector<double>& values,
                                const std::vector<double>& weights, double capacity) {
  BnbState st;
  st.values = &values;
  st.weights = &weights;
  st.order.resize(values.size());
  std::iota(st.order.begin(), st.order.end(), 0);
  std::stable_sort(st.order.begin(), st.order.end(), [&](int a, int b) {
    return values[a] / weights[a] > values[b] / weights[b];
  });
  branch(st, 0, capacity, 0.0);
  KnapsackResult out;
  out.value = std::max(0.0, st.best);
  out.chosen = st.best_set;
  std::sort(out.chosen.begin(), out.chosen.end());
  return out;
}

KnapsackResult greedy(const std::vector<double>& values, const std::vector<double>& weights,
                      double capacity) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[a] / weights[a] > values[b] / weights[b];
  });
  KnapsackResult out;
  out.exact = false;
  double room = capacity;
  for (int i : order) {
    if (weights[i] <= room + kIntTol) {
      out.chosen.push_back(i);
      out.value += values[i];
      room -= weights[i];
    }
  }
  std::sort(out.chosen.begin(), out.chosen.end());
  return out;
}

}  // namespace

bool all_integer(const std::vector<double>& weights) {
  return std::all_of(weights.begin(), weights.end(),
                     [](double w) { return std::abs(w - std::round(w)) <= kIntTol; });
}

namespace {

KnapsackResult solve(const std::vector<double>& values, const std::vector<double>& weights,
                     double capacity, KnapsackMethod method) {
  if (method == KnapsackMethod::Greedy) return greedy(values, weights, capacity);
  if (all_integer(weights) && floor_capacity(capacity) <= kMaxDpCapacity)
    return dynamic_program(values, weights, capacity);
  if (values.size() <= static_cast<std::size_t>(kMaxBranchAndBoundItems))
    return branch_and_bound(values, weights, capacity);
  if (method == KnapsackMethod::Exact)
    throw Unsupported("exact knapsack needs integer weights or at most 25 items");
  return greedy(values, weights, capacity);
}

}  // namespace

KnapsackResult knapsack_max(const std::vector<double>& values, const std::vector<double>& weights,
                            double capacity, KnapsackMethod method) {
  if (values.size() != weights.size()) throw DimensionMismatch("knapsack: size mismatch");
  if (values.empty() || capacity < 0) return {};
  KnapsackResult out = solve(values, weights, capacity, method);
  // The value is re-added in index order so that it does not depend on the
  // order in which the search visited the chosen items.
  std::sort(out.chosen.begin(), out.chosen.end());
  out.value = 0.0;
  for (int i : out.chosen) out.value += values[i];
  return out;
}

double knapsack_relaxed(const std::vector<double>& values, const std::vector<double>& weights,
                        double capacity) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[a] / weights[a] > values[b] / weights[b];
  });
  double room = capacity;
  double total = 0.0;
  for (int i : order) {
    if (room <= 0) break;
    const double upper = std::min(1.0, std::floor(capacity / weights[i] + kIntTol));
    if (upper <= 0) continue;
    const double eta = std::min(upper, room / weights[i]);
    total += eta * values[i];
    room -= eta * weights[i];
  }
  return total;
}

}  // namespace structrec
