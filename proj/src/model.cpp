#include "netsyn/model.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "netsyn/slalg.hpp"

namespace netsyn {
namespace {

using json = nlohmann::ordered_json;

bool is_zero(const Matrix& m) {
  return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0;
}

void check_pattern(const Eigen::MatrixXi& a, std::vector<ValidationIssue>* out) {
  auto add = [out](const std::string& msg) {
    out->push_back({"pattern", msg});
  };
  if (a.rows() != a.cols()) {
    add("adjacency matrix is not square");
    return;
  }
  if (a.rows() < 1) add("network is empty");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0) {
      add("nonzero diagonal entry");
      break;
    }
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0 && a(i, j) != 1) {
        add("entries must be 0 or 1");
        return;
      }
      if (a(i, j) != a(j, i)) {
        add("adjacency matrix is not symmetric");
        return;
      }
    }
}

void check_shape(const char* name, const DecomposableMatrix& m, int rows,
                 int cols, std::vector<ValidationIssue>* out) {
  if (m.d.rows() != rows || m.d.cols() != cols)
    out->push_back({name, "diagonal part must be " + std::to_string(rows) +
                              "x" + std::to_string(cols)});
  if (m.i.rows() != rows || m.i.cols() != cols)
    out->push_back({name, "interaction part must be " + std::to_string(rows) +
                              "x" + std::to_string(cols)});
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ModelError(std::string(what) + ": expected an array");
  const int rows = static_cast<int>(j.size());
  int cols = -1;
  for (const auto& row : j) {
    if (!row.is_array())
      throw ModelError(std::string(what) + ": expected an array of arrays");
    if (cols < 0)
      cols = static_cast<int>(row.size());
    else if (static_cast<int>(row.size()) != cols)
      throw ModelError(std::string(what) + ": ragged rows");
  }
  if (rows == 0 || cols <= 0)
    throw ModelError(std::string(what) + ": empty matrix");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) {
      const auto& cell = j[i][c];
      if (!cell.is_number())
        throw ModelError(std::string(what) + ": non-numeric entry");
      m(i, c) = cell.get<double>();
    }
  return m;
}

DecomposableMatrix block_from_json(const json& sys, const char* key, int rows,
                                   int cols) {
  if (!sys.contains(key)) return DecomposableMatrix::zero(rows, cols);
  const json& b = sys.at(key);
  if (!b.is_object())
    throw ModelError(std::string(key) + ": expected {\"d\": ..., \"i\": ...}");
  DecomposableMatrix m = DecomposableMatrix::zero(rows, cols);
  if (b.contains("d")) m.d = matrix_from_json(b.at("d"), key);
  if (b.contains("i")) m.i = matrix_from_json(b.at("i"), key);
  return m;
}

void block_to_json(json* sys, const char* key, const DecomposableMatrix& m) {
  const bool d0 = is_zero(m.d);
  const bool i0 = is_zero(m.i);
  if (d0 && i0) return;
  json b = json::object();
  if (!d0) b["d"] = matrix_to_json(m.d);
  if (!i0) b["i"] = matrix_to_json(m.i);
  (*sys)[key] = std::move(b);
}

}  // namespace

PatternGraph make_pattern(const Eigen::MatrixXi& adjacency) {
  std::vector<ValidationIssue> issues;
  check_pattern(adjacency, &issues);
  if (!issues.empty()) throw ModelError("pattern: " + issues.front().message);
  return PatternGraph{adjacency};
}

PatternGraph ring_pattern(int n) {
  if (n < 2) throw ModelError("ring_pattern: need at least 2 nodes");
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    a(i, j) = 1;
    a(j, i) = 1;
  }
  return PatternGraph{a};
}

DecomposableMatrix DecomposableMatrix::diag_only(Matrix d_part) {
  DecomposableMatrix m;
  m.i = Matrix::Zero(d_part.rows(), d_part.cols());
  m.d = std::move(d_part);
  return m;
}

DecomposableMatrix DecomposableMatrix::zero(int rows, int cols) {
  return {Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)};
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& issue : issues) {
    if (os.tellp() > 0) os << "; ";
    os << issue.field << ": " << issue.message;
  }
  return os.str();
}

ValidationReport validate(const HomogeneousSystem& sys) {
  ValidationReport rep;
  check_pattern(sys.pattern.adjacency, &rep.issues);
  const auto& d = sys.dims;
  if (d.n < 1) rep.issues.push_back({"dims", "state dimension must be >= 1"});
  if (d.n_u < 1) rep.issues.push_back({"dims", "input dimension must be >= 1"});
  if (d.n_w < 1)
    rep.issues.push_back({"dims", "disturbance dimension must be >= 1"});
  if (d.n_z < 1)
    rep.issues.push_back({"dims", "performance dimension must be >= 1"});
  if (d.n_y < 0)
    rep.issues.push_back({"dims", "measurement dimension must be >= 0"});
  if (!rep.issues.empty()) return rep;

  check_shape("A", sys.A, d.n, d.n, &rep.issues);
  check_shape("B_u", sys.B_u, d.n, d.n_u, &rep.issues);
  check_shape("B_w", sys.B_w, d.n, d.n_w, &rep.issues);
  check_shape("C_y", sys.C_y, d.n_y, d.n, &rep.issues);
  check_shape("D_yw", sys.D_yw, d.n_y, d.n_w, &rep.issues);
  check_shape("C_z", sys.C_z, d.n_z, d.n, &rep.issues);
  check_shape("D_zu", sys.D_zu, d.n_z, d.n_u, &rep.issues);
  check_shape("D_zw", sys.D_zw, d.n_z, d.n_w, &rep.issues);
  if (!rep.issues.empty()) return rep;

  if (!is_zero(sys.D_zw.d))
    rep.issues.push_back(
        {"D_zw", "local disturbance feedthrough must be zero"});
  return rep;
}

void require_valid(const HomogeneousSystem& sys) {
  ValidationReport rep = validate(sys);
  if (!rep.ok()) throw ModelError("invalid system: " + rep.summary());
}

bool lft_exact(const HomogeneousSystem& sys) {
  return is_zero(sys.B_u.i) && is_zero(sys.B_w.i) && is_zero(sys.D_zu.i) &&
         is_zero(sys.D_zw.i);
}

SubsystemPlant subsystem_plant(const HomogeneousSystem& sys) {
  require_valid(sys);
  const auto& d = sys.dims;
  SubsystemPlant p;
  p.A = sys.A.d;
  p.B_u = sys.B_u.d;
  p.B_w = sys.B_w.d;
  p.B_p.resize(d.n, d.n_q());
  p.B_p << sys.A.i, sys.B_u.i;

  p.C_y = sys.C_y.d;
  p.D_yu = Matrix::Zero(d.n_y, d.n_u);
  p.D_yw = sys.D_yw.d;
  p.D_yp.resize(d.n_y, d.n_q());
  p.D_yp << sys.C_y.i, Matrix::Zero(d.n_y, d.n_u);

  p.C_z = sys.C_z.d;
  p.D_zu = sys.D_zu.d;
  p.D_zw = sys.D_zw.d;
  p.D_zp.resize(d.n_z, d.n_q());
  p.D_zp << sys.C_z.i, sys.D_zu.i;

  p.C_q.resize(d.n_q(), d.n);
  p.C_q << Matrix::Identity(d.n, d.n), Matrix::Zero(d.n_u, d.n);
  p.D_qu.resize(d.n_q(), d.n_u);
  p.D_qu << Matrix::Zero(d.n, d.n_u), Matrix::Identity(d.n_u, d.n_u);
  p.D_qw = Matrix::Zero(d.n_q(), d.n_w);
  return p;
}

Matrix expand(const DecomposableMatrix& m, const PatternGraph& g) {
  const int n = g.size();
  Matrix out = kron(Matrix::Identity(n, n), m.d);
  if (!is_zero(m.i)) out += kron(g.dense(), m.i);
  return out;
}

Matrix interconnection_matrix(const PatternGraph& g, int n_q) {
  return kron(g.dense(), Matrix::Identity(n_q, n_q));
}

Matrix ClosedLoopSystem::interconnection() const {
  return interconnection_matrix(pattern, dims.n_q());
}

ClosedLoopSystem close_loop(const HomogeneousSystem& sys,
                            const ControllerGains& k) {
  require_valid(sys);
  const auto& d = sys.dims;
  if (k.K_d.rows() != d.n_u || k.K_d.cols() != d.n || k.K_i.rows() != d.n_u ||
      k.K_i.cols() != d.n)
    throw ModelError("close_loop: gain dimensions do not match the system");

  ClosedLoopSystem cl;
  cl.pattern = sys.pattern;
  cl.dims = d;

  cl.A = DecomposableMatrix::diag_only(sys.A.d + sys.B_u.d * k.K_d +
                                       sys.B_u.i * k.K_i);
  Matrix b1(d.n, d.n_q());
  b1 << sys.A.i, sys.B_u.d;
  cl.B1 = DecomposableMatrix::diag_only(b1);
  cl.B2 = DecomposableMatrix::diag_only(sys.B_w.d);

  Matrix c1(d.n_q(), d.n);
  c1 << Matrix::Identity(d.n, d.n), k.K_i;
  cl.C1 = DecomposableMatrix::diag_only(c1);
  cl.D11 = DecomposableMatrix::zero(d.n_q(), d.n_q());
  cl.D12 = DecomposableMatrix::zero(d.n_q(), d.n_w);

  cl.C2 = DecomposableMatrix::diag_only(sys.C_z.d + sys.D_zu.d * k.K_d +
                                        sys.D_zu.i * k.K_i);
  Matrix d21(d.n_z, d.n_q());
  d21 << sys.C_z.i, sys.D_zu.d;
  cl.D21 = DecomposableMatrix::diag_only(d21);
  cl.D22 = DecomposableMatrix::diag_only(sys.D_zw.d);
  return cl;
}

HomogeneousSystem read_system_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("system JSON: ") + e.what());
  }
  if (!j.is_object()) throw ModelError("system JSON: expected an object");
  if (!j.contains("pattern") || !j.contains("dims"))
    throw ModelError("system JSON: \"pattern\" and \"dims\" are required");

  Matrix pd = matrix_from_json(j.at("pattern"), "pattern");
  Eigen::MatrixXi a(pd.rows(), pd.cols());
  for (Eigen::Index i = 0; i < pd.rows(); ++i)
    for (Eigen::Index c = 0; c < pd.cols(); ++c) {
      const double v = pd(i, c);
      if (v != 0.0 && v != 1.0)
        throw ModelError("pattern: entries must be 0 or 1");
      a(i, c) = static_cast<int>(v);
    }

  const json& dj = j.at("dims");
  Dimensions dims;
  auto dim = [&dj](const char* key) {
    if (!dj.contains(key) || !dj.at(key).is_number_integer())
      throw ModelError(std::string("dims.") + key + ": integer required");
    return dj.at(key).get<int>();
  };
  dims.n = dim("n");
  dims.n_u = dim("n_u");
  dims.n_y = dim("n_y");
  dims.n_w = dim("n_w");
  dims.n_z = dim("n_z");

  HomogeneousSystem sys;
  sys.pattern = PatternGraph{a};
  sys.dims = dims;
  sys.A = block_from_json(j, "A", dims.n, dims.n);
  sys.B_u = block_from_json(j, "B_u", dims.n, dims.n_u);
  sys.B_w = block_from_json(j, "B_w", dims.n, dims.n_w);
  sys.C_y = block_from_json(j, "C_y", dims.n_y, dims.n);
  sys.D_yw = block_from_json(j, "D_yw", dims.n_y, dims.n_w);
  sys.C_z = block_from_json(j, "C_z", dims.n_z, dims.n);
  sys.D_zu = block_from_json(j, "D_zu", dims.n_z, dims.n_u);
  sys.D_zw = block_from_json(j, "D_zw", dims.n_z, dims.n_w);

  ValidationReport rep = validate(sys);
  if (!rep.ok()) throw ModelError("system JSON: " + rep.summary());
  return sys;
}

std::string write_system_json(const HomogeneousSystem& sys) {
  json j = json::object();
  j["pattern"] = matrix_to_json(sys.pattern.dense());
  j["dims"] = {{"n", sys.dims.n},
               {"n_u", sys.dims.n_u},
               {"n_y", sys.dims.n_y},
               {"n_w", sys.dims.n_w},
               {"n_z", sys.dims.n_z}};
  block_to_json(&j, "A", sys.A);
  block_to_json(&j, "B_u", sys.B_u);
  block_to_json(&j, "B_w", sys.B_w);
  block_to_json(&j, "C_y", sys.C_y);
  block_to_json(&j, "D_yw", sys.D_yw);
  block_to_json(&j, "C_z", sys.C_z);
  block_to_json(&j, "D_zu", sys.D_zu);
  block_to_json(&j, "D_zw", sys.D_zw);
  return j.dump(2) + "\n";
}

HomogeneousSystem load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open system file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_system_json(buf.str());
}

void save_system_file(const HomogeneousSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write system file: " + path);
  out << write_system_json(sys);
}

}  // namespace netsyn
