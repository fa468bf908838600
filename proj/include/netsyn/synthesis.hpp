#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "netsyn/analysis.hpp"
#include "netsyn/assemblies.hpp"
#include "netsyn/lmi.hpp"
#include "netsyn/model.hpp"

namespace netsyn {

enum class StructureMode { kron, blockdiag, full };
enum class MultiplierMode { all, extremes };

std::string to_string(StructureMode m);
std::string to_string(MultiplierMode m);

struct SynthesisOptions {
  StructureMode structure = StructureMode::kron;
  MultiplierMode multiplier = MultiplierMode::all;
  double gamma_lo = 1e-4;
  double gamma_hi = 0.0;  // 0 = seed from the open-loop frequency sweep
  double bisect_tol = 1e-4;
  double eps_scale = 1e-7;
  bool rho_objective = false;  // single maximization solve instead of bisection
  SolverOptions solver;
  int full_size_guard = 12;  // largest N the full-size path accepts
  bool verify = true;        // a-posteriori certificate verification
  bool advisory_verify = false;  // include the LMI probes in verification
  double cond_limit = 1e12;      // gain-recovery conditioning threshold
};

struct ProbeRecord {
  double gamma = 0.0;
  bool feasible = false;
  SolveStatus status = SolveStatus::failed;
  double residual = 0.0;
  double seconds = 0.0;
};

struct BisectResult {
  double gamma = 0.0;
  std::vector<std::pair<double, bool>> trace;  // every probe, in order
  bool monotone = true;
  std::vector<std::string> warnings;
};

// Geometric bisection for the smallest feasible gamma within relative tol.
// Probes hi first (throws InfeasibleError when infeasible there), then lo
// (returns lo when already feasible). A non-monotone trace is flagged as a
// warning, not an error.
BisectResult bisect_gamma(const std::function<bool(double)>& feasible_at,
                          double lo, double hi, double tol);

// K_hat = M_d * F_d^{-1}, split into K_d (first n_u rows) and K_i (last n_u
// rows). Throws CertificateError when cond(F_d) exceeds cond_limit.
ControllerGains recover_gains(const Matrix& m_d, const Matrix& f_d,
                              const Dimensions& dims,
                              double cond_limit = 1e12);

struct PerEigenvalue {
  double lambda = 0.0;
  int multiplicity = 0;
  double mc_margin = 0.0;  // smallest eigenvalue of -(multiplier condition)
  double nc_margin = 0.0;  // smallest eigenvalue of the nominal condition
  double y_margin = 0.0;   // smallest eigenvalue of Y_d + lambda*Y_i
};

struct SynthesisResult {
  StructureMode structure = StructureMode::kron;
  MultiplierMode multiplier = MultiplierMode::all;
  ControllerGains gains;
  double gamma_certified = 0.0;
  double gamma_verified = 0.0;  // dense closed-loop H-infinity norm
  CertificateReport verification;
  std::vector<PerEigenvalue> per_eigenvalue;
  std::vector<ProbeRecord> trace;
  std::map<std::string, Matrix> variables;  // final certificate assignment
  double seconds = 0.0;         // synthesis only
  double seconds_verify = 0.0;  // verification
  std::vector<std::string> warnings;
};

// Synthesizes a distributed gain for the network. kron and blockdiag run the
// decomposed per-eigenvalue path; full runs the network-sized dual form.
// Throws InfeasibleError when no gamma in the bracket is feasible and
// CertificateError when verification rejects the result.
SynthesisResult synthesize(const HomogeneousSystem& sys, SolverBackend& backend,
                           const SynthesisOptions& opts = {});

// Largest (by edge count) pattern commuting with g, excluding g itself; ties
// broken by lexicographically smallest row-major upper-triangle bit string.
// Branch-and-bound over all symmetric binary zero-diagonal matrices; guarded
// to N <= 8. Throws ModelError when the guard trips or no candidate exists.
PatternGraph find_commuting_pattern(const PatternGraph& g);

}  // namespace netsyn
