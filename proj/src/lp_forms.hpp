#pragma once

// LP building blocks shared by recovery and certification.

#include "structrec/lp.hpp"
#include "structrec/structures.hpp"

#include <vector>

namespace structrec::detail {

/// Epigraph variables t with sum(t) >= ||B u|| (equality at an optimum that
/// minimizes sum(t)) for a polyhedral structure norm; u occupies columns
/// u0 .. u0 + dim_x - 1. Each variable gets the given cost.
std::vector<int> add_norm_epigraph(LpBuilder& b, const SparsityStructure& st, int u0,
                                   double cost);

/// Epigraph variables for phi(A u - y), phi in {l1, linf} (any phi when A has
/// one row): l1 yields one variable per row, linf a single variable.
std::vector<int> add_residual_epigraph(LpBuilder& b, const Matrix& a, const Vector& y, int u0,
                                       NormTag phi, double cost);

/// Rows A u = y.
void add_equality(LpBuilder& b, const Matrix& a, const Vector& y, int u0);

/// Adds sum(vars) <= rhs.
void add_sum_bound(LpBuilder& b, const std::vector<int>& vars, double rhs);

}  // namespace structrec::detail
