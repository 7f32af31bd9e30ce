#include "lp_forms.hpp"

namespace structrec::detail {

std::vector<int> add_norm_epigraph(LpBuilder& b, const SparsityStructure& st, int u0,
                                   double cost) {
  std::vector<int> vars;
  auto abs_bound = [&](const std::vector<int>& idx) {
    const int t = b.add_variable(0.0, kInf, cost);
    vars.push_back(t);
    for (int i : idx) {
      b.add_row({{t, 1.0}, {u0 + i, -1.0}}, RowSense::GreaterEqual, 0.0);
      b.add_row({{t, 1.0}, {u0 + i, 1.0}}, RowSense::GreaterEqual, 0.0);
    }
  };
  if (st.kind() == StructureKind::Plain) {
    for (int i = 0; i < st.dim_x(); ++i) abs_bound({i});
    return vars;
  }
  if (st.kind() != StructureKind::Group) throw Unsupported("LP form: structure norm is not polyhedral");
  for (int l = 0; l < st.num_blocks(); ++l) {
    const std::vector<int>& idx = st.block(l);
    if (idx.size() == 1 || st.block_norm(l) == NormTag::L1) {
      for (int i : idx) abs_bound({i});
    } else if (st.block_norm(l) == NormTag::LInf) {
      abs_bound(idx);
    } else {
      throw Unsupported("LP form: l2 blocks are not polyhedral");
    }
  }
  return vars;
}

std::vector<int> add_residual_epigraph(LpBuilder& b, const Matrix& a, const Vector& y, int u0,
                                       NormTag phi, double cost) {
  const int m = static_cast<int>(a.rows());
  const int d = static_cast<int>(a.cols());
  if (phi == NormTag::L2 && m > 1) throw Unsupported("LP form: phi = l2 is not polyhedral");
  auto row_entries = [&](int i, int extra, double coef) {
    std::vector<std::pair<int, double>> e;
    for (int j = 0; j < d; ++j)
      if (a(i, j) != 0.0) e.emplace_back(u0 + j, coef * a(i, j));
    e.emplace_back(extra, 1.0);
    return e;
  };
  std::vector<int> vars;
  const bool single = phi == NormTag::LInf && m > 1;
  int t = single ? b.add_variable(0.0, kInf, cost) : -1;
  if (single) vars.push_back(t);
  for (int i = 0; i < m; ++i) {
    if (!single) {
      t = b.add_variable(0.0, kInf, cost);
      vars.push_back(t);
    }
    b.add_row(row_entries(i, t, -1.0), RowSense::GreaterEqual, -y(i));
    b.add_row(row_entries(i, t, 1.0), RowSense::GreaterEqual, y(i));
  }
  return vars;
}

void add_equality(LpBuilder& b, const Matrix& a, const Vector& y, int u0) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    std::vector<std::pair<int, double>> e;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) e.emplace_back(u0 + static_cast<int>(j), a(i, j));
    b.add_row(e, RowSense::Equal, y(i));
  }
}

void add_sum_bound(LpBuilder& b, const std::vector<int>& vars, double rhs) {
  std::vector<std::pair<int, double>> e;
  for (int v : vars) e.emplace_back(v, 1.0);
  b.add_row(e, RowSense::LessEqual, rhs);
}

}  // namespace structrec::detail
