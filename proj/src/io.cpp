#include "structrec/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace structrec {

namespace fs = std::filesystem;

Json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void save_json(const fs::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": missing header");
  long rows = -1;
  long cols = -1;
  if (std::sscanf(line.c_str(), "%ld,%ld", &rows, &cols) != 2 || rows < 0 || cols < 0)
    throw Error(path.string() + ": header must be 'rows,cols'");
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw Error(path.string() + ": too few rows");
    std::stringstream ss(line);
    std::string cell;
    long j = 0;
    while (std::getline(ss, cell, ',')) {
      if (j >= cols) throw Error(path.string() + ": too many columns in row " + std::to_string(i));
      try {
        std::size_t used = 0;
        m(i, j) = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error(path.string() + ": bad number '" + cell + "'");
      }
      ++j;
    }
    if (j != cols) throw Error(path.string() + ": too few columns in row " + std::to_string(i));
  }
  return m;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << m.rows() << ',' << m.cols() << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

Json real_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error("expected a number, got " + j.dump());
}

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(real_to_json(m(i, j)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const Json& j, const fs::path& base_dir) {
  if (j.is_string()) {
    fs::path p = j.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return read_matrix_csv(p);
  }
  if (j.is_object()) {
    const long rows = j.at("rows").get<long>();
    const long cols = j.at("cols").get<long>();
    const Json& data = j.at("data");
    if (rows < 0 || cols < 0 || static_cast<long>(data.size()) != rows * cols)
      throw Error("matrix: data length does not match rows * cols");
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i)
      for (long c = 0; c < cols; ++c) m(i, c) = real_from_json(data[i * cols + c]);
    return m;
  }
  if (j.is_array()) {
    const long rows = static_cast<long>(j.size());
    const long cols = rows > 0 ? static_cast<long>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i) {
      if (!j[i].is_array() || static_cast<long>(j[i].size()) != cols)
        throw Error("matrix: rows must be arrays of equal length");
      for (long c = 0; c < cols; ++c) m(i, c) = real_from_json(j[i][c]);
    }
    return m;
  }
  throw Error("matrix: expected an object, a nested array or a CSV path");
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(real_to_json(v(i)));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error("vector: expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = real_from_json(j[i]);
  return v;
}

Json structure_to_json(const SparsityStructure& st) {
  switch (st.kind()) {
    case StructureKind::Plain: return {{"kind", "plain"}, {"n", st.dim_x()}};
    case StructureKind::Group: {
      Json norms = Json::array();
      for (int l = 0; l < st.num_blocks(); ++l) norms.push_back(to_string(st.block_norm(l)));
      Json blocks = Json::array();
      for (int l = 0; l < st.num_blocks(); ++l) blocks.push_back(st.block(l));
      return {{"kind", "group"},
              {"n", st.dim_x()},
              {"blocks", blocks},
              {"weights", st.weights()},
              {"block_norms", norms}};
    }
    case StructureKind::LowRank: {
      const int p = st.transposed() ? st.cols() : st.rows();
      const int q = st.transposed() ? st.rows() : st.cols();
      return {{"kind", "lowrank"}, {"p", p}, {"q", q}};
    }
  }
  return {};
}

SparsityStructure structure_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "plain") {
      const int n = j.at("n").get<int>();
      if (n <= 0) throw InvalidStructure("plain: n must be positive");
      return SparsityStructure::plain(n);
    }
    if (kind == "group") {
      GroupParams g;
      g.n = j.at("n").get<int>();
      g.blocks = j.at("blocks").get<std::vector<std::vector<int>>>();
      if (j.contains("weights")) g.weights = j["weights"].get<std::vector<double>>();
      if (j.contains("block_norms")) {
        const Json& bn = j["block_norms"];
        if (bn.is_string()) {
          g.norms.push_back(norm_from_string(bn.get<std::string>()));
        } else {
          for (const auto& t : bn) g.norms.push_back(norm_from_string(t.get<std::string>()));
        }
      }
      return SparsityStructure::group(std::move(g));
    }
    if (kind == "lowrank") return SparsityStructure::lowrank(j.at("p").get<int>(), j.at("q").get<int>());
    throw InvalidStructure("unknown structure kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw Error(std::string("structure: ") + e.what());
  }
}

namespace {

// Index map between user and internal vectorizations of a transposed
// low-rank space: internal index of user entry (i, j) of a pu x qu matrix.
std::vector<int> user_to_internal_index(const SparsityStructure& st) {
  const int pu = st.cols();  // user rows (internal stores the transpose)
  const int qu = st.rows();
  std::vector<int> map(pu * qu);
  for (int j = 0; j < qu; ++j)
    for (int i = 0; i < pu; ++i) map[i + j * pu] = j + i * qu;
  return map;
}

bool needs_permutation(const SparsityStructure& st) {
  return st.kind() == StructureKind::LowRank && st.transposed();
}

}  // namespace

Matrix columns_to_internal(const SparsityStructure& st, const Matrix& a) {
  if (!needs_permutation(st)) return a;
  if (a.cols() != st.dim_x()) throw DimensionMismatch("A has the wrong number of columns");
  const auto map = user_to_internal_index(st);
  Matrix out(a.rows(), a.cols());
  for (std::size_t u = 0; u < map.size(); ++u) out.col(map[u]) = a.col(u);
  return out;
}

Matrix columns_to_user(const SparsityStructure& st, const Matrix& a) {
  if (!needs_permutation(st)) return a;
  if (a.cols() != st.dim_x()) throw DimensionMismatch("A has the wrong number of columns");
  const auto map = user_to_internal_index(st);
  Matrix out(a.rows(), a.cols());
  for (std::size_t u = 0; u < map.size(); ++u) out.col(u) = a.col(map[u]);
  return out;
}

Vector vector_to_internal(const SparsityStructure& st, const Vector& x) {
  return columns_to_internal(st, x.transpose()).transpose();
}

Vector vector_to_user(const SparsityStructure& st, const Vector& x) {
  return columns_to_user(st, x.transpose()).transpose();
}

ProblemSpec problem_from_json(const Json& j, const fs::path& base_dir) {
  ProblemSpec spec;
  try {
    spec.structure = structure_from_json(j.at("structure"));
    spec.problem.A = columns_to_internal(spec.structure, matrix_from_json(j.at("A"), base_dir));
    spec.problem.y = vector_from_json(j.at("y"));
    if (j.contains("phi")) spec.problem.phi = norm_from_string(j["phi"].get<std::string>());
    if (j.contains("epsilon")) spec.problem.epsilon = real_from_json(j["epsilon"]);
  } catch (const Json::exception& e) {
    throw Error(std::string("problem: ") + e.what());
  }
  if (spec.problem.A.cols() != spec.structure.dim_x())
    throw DimensionMismatch("problem: A must have dim(X) columns");
  if (spec.problem.y.size() != spec.problem.A.rows())
    throw DimensionMismatch("problem: y must have one entry per row of A");
  if (!is_vector_norm(spec.problem.phi)) throw Error("problem: phi must be l1, l2 or linf");
  if (!(spec.problem.epsilon >= 0)) throw Error("problem: epsilon must be nonnegative");
  return spec;
}

Json problem_to_json(const ProblemSpec& spec) {
  return {{"structure", structure_to_json(spec.structure)},
          {"A", matrix_to_json(columns_to_user(spec.structure, spec.problem.A))},
          {"y", vector_to_json(spec.problem.y)},
          {"phi", to_string(spec.problem.phi)},
          {"epsilon", real_to_json(spec.problem.epsilon)}};
}

Json certificate_to_json(const Certificate& cert, bool with_matrices) {
  Json j = {{"method", to_string(cert.method)},
            {"gamma", real_to_json(cert.gamma)},
            {"beta", real_to_json(cert.beta)},
            {"s", real_to_json(cert.s)},
            {"phi", to_string(cert.phi)},
            {"valid", cert.valid},
            {"beta_exact", cert.beta_exact},
            {"gamma_exact", cert.gamma_exact},
            {"gamma_bar", real_to_json(cert.gamma_bar)},
            {"notes", cert.notes}};
  if (with_matrices) {
    j["H"] = matrix_to_json(cert.H);
    j["W"] = matrix_to_json(cert.W);
  }
  return j;
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  try {
    c.method = cert_method_from_string(j.at("method").get<std::string>());
    c.gamma = real_from_json(j.at("gamma"));
    c.beta = real_from_json(j.at("beta"));
    c.s = real_from_json(j.at("s"));
    c.phi = norm_from_string(j.at("phi").get<std::string>());
    c.valid = j.value("valid", c.gamma < 1.0);
    c.beta_exact = j.value("beta_exact", true);
    c.gamma_exact = j.value("gamma_exact", true);
    if (j.contains("gamma_bar")) c.gamma_bar = real_from_json(j["gamma_bar"]);
    if (j.contains("notes")) c.notes = j["notes"].get<std::vector<std::string>>();
    if (j.contains("H")) c.H = matrix_from_json(j["H"]);
    if (j.contains("W")) c.W = matrix_from_json(j["W"]);
  } catch (const Json::exception& e) {
    throw Error(std::string("certificate: ") + e.what());
  }
  return c;
}

}  // namespace structrec
