#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "netsyn/types.hpp"

namespace netsyn {

// Pair structures stand for I (x) X_d + P (x) X_i; their lambda-instantiation
// X_d + lambda X_i is defined for any real lambda.
enum class VarStructure { symmetric, full, symmetric_pair, full_pair };

// Handle to a matrix decision variable. Symmetric structures expose only the
// upper triangle as free scalars; pair structures own two contiguous scalar
// ranges, diagonal part first.
struct DecisionVar {
  int id = -1;
  std::string name;
  VarStructure structure = VarStructure::symmetric;
  int rows = 0;
  int cols = 0;
  int offset = 0;  // first owned scalar
  int count = 0;   // owned scalars, both parts for pairs

  bool is_pair() const {
    return structure == VarStructure::symmetric_pair ||
           structure == VarStructure::full_pair;
  }
  bool is_symmetric() const {
    return structure == VarStructure::symmetric ||
           structure == VarStructure::symmetric_pair;
  }
  int scalars_per_part() const;
};

// Matrix-valued affine function of the scalar decision vector
//   A(x) = constant + sum_k coeff(k) * x_k.
class AffineMatrix {
 public:
  AffineMatrix() = default;
  explicit AffineMatrix(Matrix constant);
  static AffineMatrix zero(int rows, int cols);

  int rows() const { return static_cast<int>(constant_.rows()); }
  int cols() const { return static_cast<int>(constant_.cols()); }
  bool is_constant() const { return coeffs_.empty(); }
  const Matrix& constant() const { return constant_; }
  const std::map<int, Matrix>& coeffs() const { return coeffs_; }

  void add_constant(const Matrix& m);
  void add_coeff(int scalar, const Matrix& m);  // accumulates

  AffineMatrix operator+(const AffineMatrix& o) const;
  AffineMatrix operator-(const AffineMatrix& o) const;
  AffineMatrix operator-() const;
  AffineMatrix scaled(double s) const;
  AffineMatrix transpose() const;
  AffineMatrix block(int i0, int j0, int r, int c) const;
  Matrix eval(const Vector& x) const;

 private:
  Matrix constant_ = Matrix::Zero(0, 0);
  std::map<int, Matrix> coeffs_;
};

AffineMatrix mul(const Matrix& lhs, const AffineMatrix& rhs);
AffineMatrix mul(const AffineMatrix& lhs, const Matrix& rhs);

using AffineGrid = std::vector<std::vector<AffineMatrix>>;

// Stacks a rectangular grid of blocks; row heights and column widths must be
// consistent across the grid.
AffineMatrix compose_blocks(const AffineGrid& grid);

// outer^T * middle * outer at the block level. Every term must have at most
// one affine factor (a variable-bearing outer block may only meet constant
// middle entries and constant partner blocks); a quadratic term throws
// std::logic_error.
AffineMatrix quad_form(const AffineGrid& outer, const AffineGrid& middle);

// Declares variables and maps them to scalar indices and basis matrices.
class VarTable {
 public:
  DecisionVar declare(const std::string& name, VarStructure s, int rows,
                      int cols);
  int num_scalars() const { return next_scalar_; }
  const std::vector<DecisionVar>& vars() const { return vars_; }
  const DecisionVar* find(const std::string& name) const;

  // Affine views. part selects 0 = diagonal, 1 = interaction for pairs.
  AffineMatrix matrix(const DecisionVar& v) const;
  AffineMatrix part(const DecisionVar& v, int which) const;
  AffineMatrix instantiate(const DecisionVar& v, double lambda) const;
  AffineMatrix expanded(const DecisionVar& v, const Matrix& p_dense) const;

  // Solution extraction.
  Matrix value(const DecisionVar& v, const Vector& x, int which = 0) const;

 private:
  std::vector<DecisionVar> vars_;
  int next_scalar_ = 0;
};

// One inequality in canonical form G(x) >= 0 (the strictness margin is
// already folded into the constant term).
struct LmiConstraint {
  std::string name;
  AffineMatrix canonical;
  double eps = 0.0;  // margin that was folded in, for reporting
};

class LmiProblem {
 public:
  VarTable& vars() { return vars_; }
  const VarTable& vars() const { return vars_; }

  // g >= eps*I, respectively g <= -eps*I. Both verify approximate symmetry
  // of all coefficients (1e-12 relative) and then symmetrize exactly.
  void require_psd(const std::string& name, const AffineMatrix& g,
                   double eps = 0.0);
  void require_nsd(const std::string& name, const AffineMatrix& g,
                   double eps = 0.0);

  // Linear objective, minimized: sum coeff * x_scalar. No terms = pure
  // feasibility.
  void set_objective_term(int scalar, double coeff);
  bool has_objective() const { return !objective_.empty(); }
  Vector objective_vector() const;

  const std::vector<LmiConstraint>& constraints() const { return constraints_; }
  const LmiConstraint* find_constraint(const std::string& name) const;

 private:
  VarTable vars_;
  std::vector<LmiConstraint> constraints_;
  std::map<int, double> objective_;
};

enum class SolveStatus { feasible, infeasible, inaccurate, failed };

std::string to_string(SolveStatus s);

struct SolveOutcome {
  SolveStatus status = SolveStatus::failed;
  Vector x;            // empty when the backend returned no point
  double objective = 0.0;
  double residual = 0.0;  // worst block margin, independently re-evaluated
  std::string solver_status;
  int iterations = 0;
  std::string message;
  std::map<std::string, Matrix> assignment;  // "name" or "name.d"/"name.i"

  bool feasible() const { return status == SolveStatus::feasible; }
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;
};

enum class BackendStatus {
  solved,
  almost_solved,
  primal_infeasible,
  almost_primal_infeasible,
  dual_infeasible,
  almost_dual_infeasible,
  max_iterations,
  max_time,
  numerical_error,
  insufficient_progress,
  other,
  bad_input,
};

struct BackendResult {
  BackendStatus status = BackendStatus::other;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
  std::string detail;
};

// Conic backend contract: declare the free scalars, feed PSD constraints
// G0 + sum x_k G_k >= 0, optionally a linear objective (minimized), solve.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual void reset(int n_scalars) = 0;
  virtual void add_psd_constraint(const Matrix& g0,
                                  const std::map<int, Matrix>& coeffs) = 0;
  virtual void set_objective(const Vector& c) = 0;
  virtual BackendResult solve(const SolverOptions& opts) = 0;
  virtual std::string name() const = 0;
};

class ClarabelBackend final : public SolverBackend {
 public:
  ClarabelBackend();
  ~ClarabelBackend() override;
  void reset(int n_scalars) override;
  void add_psd_constraint(const Matrix& g0,
                          const std::map<int, Matrix>& coeffs) override;
  void set_objective(const Vector& c) override;
  BackendResult solve(const SolverOptions& opts) override;
  std::string name() const override { return "clarabel"; }

 private:
  struct Impl;
  Impl* impl_;
};

// Worst constraint margin at x: min over constraints of the smallest
// eigenvalue of the canonical G(x).
double worst_margin(const LmiProblem& p, const Vector& x);

// Drives the backend and maps its verdict through an independent residual
// re-check; a claimed-optimal point that fails the re-check degrades to
// `inaccurate`, and a point that passes it is `feasible` regardless of the
// backend status.
SolveOutcome solve(const LmiProblem& p, SolverBackend& backend,
                   const SolverOptions& opts = {});

}  // namespace netsyn
