#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "netsyn/lmi.hpp"

// C ABI of the bundled Rust solver shim. Rows of A and entries of b use the
// scaled upper-triangle vectorization (column-major, off-diagonal * sqrt(2))
// expected by the PSD triangle cone.
extern "C" int32_t netsyn_clarabel_solve(
    size_t n_vars, const double* objective, size_t n_rows,
    const size_t* a_colptr, const size_t* a_rowval, const double* a_nzval,
    const double* b, size_t n_cones, const size_t* cone_dims, double tol,
    uint32_t max_iter, bool verbose, double* x_out, double* obj_out,
    uint32_t* iters_out);

namespace netsyn {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;

int svec_len(int d) { return d * (d + 1) / 2; }

// Scaled svec of a symmetric matrix, appended to out.
void svec_append(const Matrix& m, std::vector<double>* out) {
  const int d = static_cast<int>(m.rows());
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i)
      out->push_back(i == j ? m(i, j) : kSqrt2 * m(i, j));
}

BackendStatus map_status(int32_t code) {
  switch (code) {
    case 0:
      return BackendStatus::solved;
    case 1:
      return BackendStatus::primal_infeasible;
    case 2:
      return BackendStatus::dual_infeasible;
    case 3:
      return BackendStatus::almost_solved;
    case 4:
      return BackendStatus::almost_primal_infeasible;
    case 5:
      return BackendStatus::almost_dual_infeasible;
    case 6:
      return BackendStatus::max_iterations;
    case 7:
      return BackendStatus::max_time;
    case 8:
      return BackendStatus::numerical_error;
    case 9:
      return BackendStatus::insufficient_progress;
    case -1:
      return BackendStatus::bad_input;
    default:
      return BackendStatus::other;
  }
}

const char* status_name(BackendStatus s) {
  switch (s) {
    case BackendStatus::solved:
      return "Solved";
    case BackendStatus::almost_solved:
      return "AlmostSolved";
    case BackendStatus::primal_infeasible:
      return "PrimalInfeasible";
    case BackendStatus::almost_primal_infeasible:
      return "AlmostPrimalInfeasible";
    case BackendStatus::dual_infeasible:
      return "DualInfeasible";
    case BackendStatus::almost_dual_infeasible:
      return "AlmostDualInfeasible";
    case BackendStatus::max_iterations:
      return "MaxIterations";
    case BackendStatus::max_time:
      return "MaxTime";
    case BackendStatus::numerical_error:
      return "NumericalError";
    case BackendStatus::insufficient_progress:
      return "InsufficientProgress";
    case BackendStatus::bad_input:
      return "BadInput";
    case BackendStatus::other:
      return "Other";
  }
  return "Other";
}

}  // namespace

struct ClarabelBackend::Impl {
  int n_vars = 0;
  Vector objective;
  struct Block {
    Matrix g0;
    std::map<int, Matrix> coeffs;
  };
  std::vector<Block> blocks;
};

ClarabelBackend::ClarabelBackend() : impl_(new Impl) {}
ClarabelBackend::~ClarabelBackend() { delete impl_; }

void ClarabelBackend::reset(int n_scalars) {
  impl_->n_vars = n_scalars;
  impl_->objective = Vector::Zero(n_scalars);
  impl_->blocks.clear();
}

void ClarabelBackend::add_psd_constraint(const Matrix& g0,
                                         const std::map<int, Matrix>& coeffs) {
  impl_->blocks.push_back({g0, coeffs});
}

void ClarabelBackend::set_objective(const Vector& c) {
  if (c.size() != impl_->n_vars)
    throw std::logic_error("ClarabelBackend: objective size mismatch");
  impl_->objective = c;
}

BackendResult ClarabelBackend::solve(const SolverOptions& opts) {
  const int n = impl_->n_vars;
  const size_t n_cones = impl_->blocks.size();

  std::vector<size_t> cone_dims;
  std::vector<size_t> row_offset;
  size_t n_rows = 0;
  for (const auto& blk : impl_->blocks) {
    const int d = static_cast<int>(blk.g0.rows());
    cone_dims.push_back(static_cast<size_t>(d));
    row_offset.push_back(n_rows);
    n_rows += static_cast<size_t>(svec_len(d));
  }

  std::vector<double> b;
  b.reserve(n_rows);
  for (const auto& blk : impl_->blocks) svec_append(blk.g0, &b);

  // CSC of A with column k = -svec(G_k) stacked over blocks.
  std::vector<size_t> colptr(static_cast<size_t>(n) + 1, 0);
  std::vector<size_t> rowval;
  std::vector<double> nzval;
  std::vector<double> scratch;
  for (int k = 0; k < n; ++k) {
    colptr[static_cast<size_t>(k)] = rowval.size();
    for (size_t bidx = 0; bidx < n_cones; ++bidx) {
      const auto& blk = impl_->blocks[bidx];
      auto it = blk.coeffs.find(k);
      if (it == blk.coeffs.end()) continue;
      scratch.clear();
      svec_append(it->second, &scratch);
      for (size_t r = 0; r < scratch.size(); ++r) {
        if (scratch[r] == 0.0) continue;
        rowval.push_back(row_offset[bidx] + r);
        nzval.push_back(-scratch[r]);
      }
    }
  }
  colptr[static_cast<size_t>(n)] = rowval.size();

  std::vector<double> x(static_cast<size_t>(std::max(n, 1)), 0.0);
  double obj = 0.0;
  uint32_t iters = 0;
  // Empty spans still need non-null pointers across the FFI boundary.
  static const double d_dummy = 0.0;
  static const size_t s_dummy = 0;
  std::vector<double> objbuf(impl_->objective.data(),
                             impl_->objective.data() + n);
  const int32_t code = netsyn_clarabel_solve(
      static_cast<size_t>(n), objbuf.empty() ? &d_dummy : objbuf.data(),
      n_rows, colptr.data(), rowval.empty() ? &s_dummy : rowval.data(),
      nzval.empty() ? &d_dummy : nzval.data(),
      b.empty() ? &d_dummy : b.data(), n_cones,
      cone_dims.empty() ? &s_dummy : cone_dims.data(), opts.tol,
      static_cast<uint32_t>(opts.max_iter), opts.verbose, x.data(), &obj,
      &iters);

  BackendResult out;
  out.status = map_status(code);
  out.detail = status_name(out.status);
  out.objective = obj;
  out.iterations = static_cast<int>(iters);
  out.x = Eigen::Map<Vector>(x.data(), n);
  return out;
}

}  // namespace netsyn
