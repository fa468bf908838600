#include "netsyn/lmi.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "netsyn/slalg.hpp"

namespace netsyn {
namespace {

bool zero_matrix(const Matrix& m) {
  return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0;
}

bool zero_affine(const AffineMatrix& a) {
  return a.is_constant() && zero_matrix(a.constant());
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void check_symmetric(const std::string& name, const Matrix& m) {
  const double scale = std::max(1.0, m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::logic_error("constraint " + name +
                           " is not symmetric within tolerance");
}

}  // namespace

int DecisionVar::scalars_per_part() const {
  if (is_symmetric()) return rows * (rows + 1) / 2;
  return rows * cols;
}

AffineMatrix::AffineMatrix(Matrix constant) : constant_(std::move(constant)) {}

AffineMatrix AffineMatrix::zero(int rows, int cols) {
  return AffineMatrix(Matrix::Zero(rows, cols));
}

void AffineMatrix::add_constant(const Matrix& m) {
  if (m.rows() != rows() || m.cols() != cols())
    throw std::logic_error("AffineMatrix::add_constant: size mismatch");
  constant_ += m;
}

void AffineMatrix::add_coeff(int scalar, const Matrix& m) {
  if (m.rows() != rows() || m.cols() != cols())
    throw std::logic_error("AffineMatrix::add_coeff: size mismatch");
  auto it = coeffs_.find(scalar);
  if (it == coeffs_.end())
    coeffs_.emplace(scalar, m);
  else
    it->second += m;
}

AffineMatrix AffineMatrix::operator+(const AffineMatrix& o) const {
  if (rows() != o.rows() || cols() != o.cols())
    throw std::logic_error("AffineMatrix::operator+: size mismatch");
  AffineMatrix out(constant_ + o.constant_);
  out.coeffs_ = coeffs_;
  for (const auto& [k, m] : o.coeffs_) out.add_coeff(k, m);
  return out;
}

AffineMatrix AffineMatrix::operator-(const AffineMatrix& o) const {
  return *this + (-o);
}

AffineMatrix AffineMatrix::operator-() const { return scaled(-1.0); }

AffineMatrix AffineMatrix::scaled(double s) const {
  AffineMatrix out(s * constant_);
  for (const auto& [k, m] : coeffs_) out.coeffs_.emplace(k, s * m);
  return out;
}

AffineMatrix AffineMatrix::transpose() const {
  AffineMatrix out(constant_.transpose());
  for (const auto& [k, m] : coeffs_) out.coeffs_.emplace(k, m.transpose());
  return out;
}

AffineMatrix AffineMatrix::block(int i0, int j0, int r, int c) const {
  if (i0 < 0 || j0 < 0 || i0 + r > rows() || j0 + c > cols())
    throw std::logic_error("AffineMatrix::block: out of range");
  AffineMatrix out(constant_.block(i0, j0, r, c));
  for (const auto& [k, m] : coeffs_) {
    Matrix sub = m.block(i0, j0, r, c);
    if (!zero_matrix(sub)) out.coeffs_.emplace(k, std::move(sub));
  }
  return out;
}

Matrix AffineMatrix::eval(const Vector& x) const {
  Matrix out = constant_;
  for (const auto& [k, m] : coeffs_) {
    if (k < 0 || k >= x.size())
      throw std::logic_error("AffineMatrix::eval: scalar index out of range");
    out += x[k] * m;
  }
  return out;
}

AffineMatrix mul(const Matrix& lhs, const AffineMatrix& rhs) {
  if (lhs.cols() != rhs.rows())
    throw std::logic_error("mul(Matrix, AffineMatrix): size mismatch");
  AffineMatrix out(lhs * rhs.constant());
  for (const auto& [k, m] : rhs.coeffs()) out.add_coeff(k, lhs * m);
  return out;
}

AffineMatrix mul(const AffineMatrix& lhs, const Matrix& rhs) {
  if (lhs.cols() != rhs.rows())
    throw std::logic_error("mul(AffineMatrix, Matrix): size mismatch");
  AffineMatrix out(lhs.constant() * rhs);
  for (const auto& [k, m] : lhs.coeffs()) out.add_coeff(k, m * rhs);
  return out;
}

AffineMatrix compose_blocks(const AffineGrid& grid) {
  if (grid.empty() || grid.front().empty())
    throw std::logic_error("compose_blocks: empty grid");
  const size_t ncols = grid.front().size();
  std::vector<int> row_h(grid.size(), 0);
  std::vector<int> col_w(ncols, 0);
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].size() != ncols)
      throw std::logic_error("compose_blocks: ragged grid");
    row_h[i] = grid[i].front().rows();
    for (size_t j = 0; j < ncols; ++j) {
      if (grid[i][j].rows() != row_h[i])
        throw std::logic_error("compose_blocks: inconsistent block heights");
      if (i == 0) col_w[j] = grid[i][j].cols();
      if (grid[i][j].cols() != col_w[j])
        throw std::logic_error("compose_blocks: inconsistent block widths");
    }
  }
  int total_r = 0, total_c = 0;
  for (int h : row_h) total_r += h;
  for (int w : col_w) total_c += w;

  AffineMatrix out = AffineMatrix::zero(total_r, total_c);
  Matrix constant = Matrix::Zero(total_r, total_c);
  std::map<int, Matrix> coeffs;
  int r0 = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    int c0 = 0;
    for (size_t j = 0; j < ncols; ++j) {
      const AffineMatrix& b = grid[i][j];
      constant.block(r0, c0, row_h[i], col_w[j]) = b.constant();
      for (const auto& [k, m] : b.coeffs()) {
        auto it = coeffs.find(k);
        if (it == coeffs.end())
          it = coeffs.emplace(k, Matrix::Zero(total_r, total_c)).first;
        it->second.block(r0, c0, row_h[i], col_w[j]) += m;
      }
      c0 += col_w[j];
    }
    r0 += row_h[i];
  }
  out = AffineMatrix(std::move(constant));
  for (auto& [k, m] : coeffs) out.add_coeff(k, m);
  return out;
}

AffineMatrix quad_form(const AffineGrid& outer, const AffineGrid& middle) {
  if (outer.empty() || outer.front().empty())
    throw std::logic_error("quad_form: empty outer grid");
  const size_t nrows = outer.size();
  const size_t ncols = outer.front().size();
  if (middle.size() != nrows)
    throw std::logic_error("quad_form: middle grid row count mismatch");
  for (const auto& row : middle)
    if (row.size() != nrows)
      throw std::logic_error("quad_form: middle grid must be square");

  std::vector<int> heights(nrows), widths(ncols);
  for (size_t i = 0; i < nrows; ++i) {
    if (outer[i].size() != ncols)
      throw std::logic_error("quad_form: ragged outer grid");
    heights[i] = outer[i].front().rows();
    for (size_t c = 0; c < ncols; ++c) {
      if (outer[i][c].rows() != heights[i])
        throw std::logic_error("quad_form: inconsistent outer block heights");
      if (i == 0) widths[c] = outer[i][c].cols();
      if (outer[i][c].cols() != widths[c])
        throw std::logic_error("quad_form: inconsistent outer block widths");
    }
  }
  for (size_t i = 0; i < nrows; ++i)
    for (size_t j = 0; j < nrows; ++j)
      if (middle[i][j].rows() != heights[i] || middle[i][j].cols() != heights[j])
        throw std::logic_error("quad_form: middle block size mismatch");

  AffineGrid res(ncols);
  for (size_t c = 0; c < ncols; ++c) {
    res[c].reserve(ncols);
    for (size_t d = 0; d < ncols; ++d)
      res[c].push_back(AffineMatrix::zero(widths[c], widths[d]));
  }

  for (size_t i = 0; i < nrows; ++i) {
    for (size_t j = 0; j < nrows; ++j) {
      const AffineMatrix& mid = middle[i][j];
      if (zero_affine(mid)) continue;
      for (size_t c = 0; c < ncols; ++c) {
        const AffineMatrix& left = outer[i][c];
        if (zero_affine(left)) continue;
        for (size_t d = 0; d < ncols; ++d) {
          const AffineMatrix& right = outer[j][d];
          if (zero_affine(right)) continue;
          const int affine = (left.is_constant() ? 0 : 1) +
                             (mid.is_constant() ? 0 : 1) +
                             (right.is_constant() ? 0 : 1);
          if (affine >= 2)
            throw std::logic_error(
                "quad_form: term is quadratic in the decision variables");
          AffineMatrix term;
          if (!left.is_constant()) {
            term = mul(left.transpose(), mid.constant() * right.constant());
          } else if (!mid.is_constant()) {
            term = mul(left.constant().transpose(),
                       mul(mid, right.constant()));
          } else {
            term = mul(left.constant().transpose() * mid.constant(), right);
          }
          res[c][d] = res[c][d] + term;
        }
      }
    }
  }
  return compose_blocks(res);
}

DecisionVar VarTable::declare(const std::string& name, VarStructure s,
                              int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw std::logic_error("VarTable::declare: sizes must be positive");
  if ((s == VarStructure::symmetric || s == VarStructure::symmetric_pair) &&
      rows != cols)
    throw std::logic_error("VarTable::declare: symmetric variables are square");
  if (find(name) != nullptr)
    throw std::logic_error("VarTable::declare: duplicate name " + name);

  DecisionVar v;
  v.id = static_cast<int>(vars_.size());
  v.name = name;
  v.structure = s;
  v.rows = rows;
  v.cols = cols;
  v.offset = next_scalar_;
  v.count = v.scalars_per_part() * (v.is_pair() ? 2 : 1);
  next_scalar_ += v.count;
  vars_.push_back(v);
  return v;
}

const DecisionVar* VarTable::find(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.name == name) return &v;
  return nullptr;
}

namespace {

// Calls fn(local_scalar, basis) for each free scalar of one part.
template <typename Fn>
void for_each_basis(const DecisionVar& v, Fn&& fn) {
  int t = 0;
  if (v.is_symmetric()) {
    for (int j = 0; j < v.rows; ++j)
      for (int i = 0; i <= j; ++i) {
        Matrix b = Matrix::Zero(v.rows, v.cols);
        b(i, j) = 1.0;
        if (i != j) b(j, i) = 1.0;
        fn(t++, b);
      }
  } else {
    for (int j = 0; j < v.cols; ++j)
      for (int i = 0; i < v.rows; ++i) {
        Matrix b = Matrix::Zero(v.rows, v.cols);
        b(i, j) = 1.0;
        fn(t++, b);
      }
  }
}

}  // namespace

AffineMatrix VarTable::matrix(const DecisionVar& v) const {
  if (v.is_pair())
    throw std::logic_error("VarTable::matrix: use part() for pair variables");
  return part(v, 0);
}

AffineMatrix VarTable::part(const DecisionVar& v, int which) const {
  if (which != 0 && which != 1)
    throw std::logic_error("VarTable::part: part index must be 0 or 1");
  if (which == 1 && !v.is_pair())
    throw std::logic_error("VarTable::part: variable has no interaction part");
  AffineMatrix out = AffineMatrix::zero(v.rows, v.cols);
  const int base = v.offset + which * v.scalars_per_part();
  for_each_basis(v, [&](int t, const Matrix& b) { out.add_coeff(base + t, b); });
  return out;
}

AffineMatrix VarTable::instantiate(const DecisionVar& v, double lambda) const {
  if (!v.is_pair()) return part(v, 0);
  AffineMatrix out = part(v, 0);
  out = out + part(v, 1).scaled(lambda);
  return out;
}

AffineMatrix VarTable::expanded(const DecisionVar& v,
                                const Matrix& p_dense) const {
  const int n = static_cast<int>(p_dense.rows());
  const Matrix eye = Matrix::Identity(n, n);
  AffineMatrix out = AffineMatrix::zero(n * v.rows, n * v.cols);
  const int base_d = v.offset;
  for_each_basis(
      v, [&](int t, const Matrix& b) { out.add_coeff(base_d + t, kron(eye, b)); });
  if (v.is_pair()) {
    const int base_i = v.offset + v.scalars_per_part();
    for_each_basis(v, [&](int t, const Matrix& b) {
      out.add_coeff(base_i + t, kron(p_dense, b));
    });
  }
  return out;
}

Matrix VarTable::value(const DecisionVar& v, const Vector& x, int which) const {
  Matrix out = Matrix::Zero(v.rows, v.cols);
  const int base = v.offset + which * v.scalars_per_part();
  for_each_basis(v, [&](int t, const Matrix& b) {
    const int k = base + t;
    if (k < 0 || k >= x.size())
      throw std::logic_error("VarTable::value: scalar index out of range");
    out += x[k] * b;
  });
  return out;
}

void LmiProblem::require_psd(const std::string& name, const AffineMatrix& g,
                             double eps) {
  if (g.rows() != g.cols())
    throw std::logic_error("constraint " + name + " is not square");
  check_symmetric(name, g.constant());
  for (const auto& [k, m] : g.coeffs()) check_symmetric(name, m);

  LmiConstraint c;
  c.name = name;
  c.eps = eps;
  Matrix g0 = symmetrized(g.constant());
  g0 -= eps * Matrix::Identity(g.rows(), g.cols());
  c.canonical = AffineMatrix(std::move(g0));
  for (const auto& [k, m] : g.coeffs()) c.canonical.add_coeff(k, symmetrized(m));
  constraints_.push_back(std::move(c));
}

void LmiProblem::require_nsd(const std::string& name, const AffineMatrix& g,
                             double eps) {
  require_psd(name, -g, eps);
}

void LmiProblem::set_objective_term(int scalar, double coeff) {
  objective_[scalar] += coeff;
}

Vector LmiProblem::objective_vector() const {
  Vector c = Vector::Zero(vars_.num_scalars());
  for (const auto& [k, v] : objective_) {
    if (k < 0 || k >= c.size())
      throw std::logic_error("objective references an undeclared scalar");
    c[k] = v;
  }
  return c;
}

const LmiConstraint* LmiProblem::find_constraint(const std::string& name) const {
  for (const auto& c : constraints_)
    if (c.name == name) return &c;
  return nullptr;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::feasible:
      return "feasible";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::inaccurate:
      return "inaccurate";
    case SolveStatus::failed:
      return "failed";
  }
  return "unknown";
}

double worst_margin(const LmiProblem& p, const Vector& x) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& c : p.constraints()) {
    Matrix g = c.canonical.eval(x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(g),
                                             Eigen::EigenvaluesOnly);
    margin = std::min(margin, es.eigenvalues().minCoeff());
  }
  return margin;
}

SolveOutcome solve(const LmiProblem& p, SolverBackend& backend,
                   const SolverOptions& opts) {
  const int n = p.vars().num_scalars();
  SolveOutcome out;

  if (p.constraints().empty() && !p.has_objective()) {
    out.status = SolveStatus::feasible;
    out.x = Vector::Zero(n);
    out.residual = std::numeric_limits<double>::infinity();
    out.solver_status = "trivial";
    out.message = "no constraints";
  } else {
    backend.reset(n);
    double block_scale = 1.0;
    for (const auto& c : p.constraints()) {
      const Matrix& g0 = c.canonical.constant();
      backend.add_psd_constraint(g0, c.canonical.coeffs());
      if (g0.size() > 0)
        block_scale = std::max(block_scale, g0.cwiseAbs().maxCoeff());
    }
    backend.set_objective(p.objective_vector());
    BackendResult r = backend.solve(opts);

    out.solver_status = r.detail;
    out.iterations = r.iterations;
    out.objective = r.objective;
    const bool has_x = r.x.size() == n;
    const bool candidate_point =
        has_x && r.status != BackendStatus::primal_infeasible &&
        r.status != BackendStatus::almost_primal_infeasible &&
        r.status != BackendStatus::dual_infeasible &&
        r.status != BackendStatus::almost_dual_infeasible;
    out.residual = -std::numeric_limits<double>::infinity();
    if (has_x) out.x = r.x;
    if (candidate_point) out.residual = worst_margin(p, r.x);
    const bool recheck_ok =
        candidate_point && out.residual >= -10.0 * opts.tol * block_scale;

    switch (r.status) {
      case BackendStatus::solved:
      case BackendStatus::almost_solved:
        out.status = recheck_ok ? SolveStatus::feasible : SolveStatus::inaccurate;
        if (!recheck_ok) out.message = "solution failed the residual re-check";
        break;
      case BackendStatus::primal_infeasible:
        out.status = SolveStatus::infeasible;
        break;
      case BackendStatus::almost_primal_infeasible:
        out.status = SolveStatus::infeasible;
        out.message = "infeasibility certificate at reduced accuracy";
        break;
      case BackendStatus::dual_infeasible:
      case BackendStatus::almost_dual_infeasible:
        out.status = SolveStatus::failed;
        out.message = "objective unbounded (dual infeasible)";
        break;
      default:
        // A returned point that passes the re-check is a certificate no
        // matter what stopped the solver.
        out.status = recheck_ok ? SolveStatus::feasible : SolveStatus::failed;
        if (!out.message.empty()) out.message += "; ";
        out.message += "backend stopped: " + r.detail;
        break;
    }
  }

  if (out.x.size() == n && n > 0) {
    for (const auto& v : p.vars().vars()) {
      if (v.is_pair()) {
        out.assignment[v.name + ".d"] = p.vars().value(v, out.x, 0);
        out.assignment[v.name + ".i"] = p.vars().value(v, out.x, 1);
      } else {
        out.assignment[v.name] = p.vars().value(v, out.x, 0);
      }
    }
  }
  return out;
}

}  // namespace netsyn
