#pragma once

#include <string>
#include <vector>

#include "netsyn/lmi.hpp"
#include "netsyn/model.hpp"

namespace netsyn {

// Options shared by all inequality assemblies. Strict inequalities are
// realized as >= eps*I with eps = eps_scale * problem_scale(plant), which is
// independent of gamma so the full and decomposed problems stay equivalent.
struct AssemblyOptions {
  double eps_scale = 1e-7;
  // Restrict the synthesis variables to their block-diagonal parts
  // (interaction parts pinned to zero). Baseline mode.
  bool blockdiag = false;
  // Convexified multiplier option: R_i pinned to zero plus the side
  // condition -S_i^T - S_i + R_d >= 0, so the spectrum only needs checking
  // at its extremes.
  bool extremes = false;
  // Replace the fixed -(1/gamma^2) performance entry of the dual forms by a
  // free scalar rho that is maximized; gamma_cert = 1/sqrt(rho).
  bool rho_objective = false;
  // Upper cap on rho (as a gamma floor) keeping the maximization bounded.
  double rho_gamma_floor = 1e-4;
  // Pin M = 0, synthesizing nothing (used to probe open-loop feasibility).
  bool force_zero_gain = false;
};

// max(1, largest infinity-norm over the subsystem data blocks).
double problem_scale(const SubsystemPlant& plant);

// Numeric values for a pair-structured multiplier triple.
struct MultiplierAssignment {
  Matrix Q_d, Q_i, S_d, S_i, R_d, R_i;
};

// Full-size dual multiplier condition evaluated at a numeric assignment:
//   Q - S*PP - PP*S^T + PP*R*PP  with PP = P (x) I and V = I (x) V_d + P (x) V_i.
// Negative definiteness of this matrix is the structural constraint on the
// multiplier triple.
Matrix dual_mc_full(const Matrix& p_dense, const MultiplierAssignment& m);

// Per-eigenvalue form of the same condition:
//   Q_d + l*(Q_i - S_d^T - S_d) + l^2*(-S_i^T - S_i + R_d) + l^3*R_i.
Matrix dual_mc_at(double lambda, const MultiplierAssignment& m);

// Shared variable set of the dual synthesis forms.
struct DualVars {
  DecisionVar Y;  // symmetric_pair (plain symmetric in blockdiag mode)
  DecisionVar F;  // full n x n slack, diagonal part only
  DecisionVar M;  // full 2*n_u x n convexifying substitution, unless pinned
  DecisionVar Q, S, R;  // multiplier triple
  bool has_m = false;
  DecisionVar rho;  // declared only under rho_objective
  bool has_rho = false;
};

DualVars declare_dual_vars(LmiProblem& p, const Dimensions& dims,
                           const AssemblyOptions& opts);

// Constraints valid for every eigenvalue: slack positivity F + F^T >= eps*I,
// the extremes-mode side condition, and the rho cap.
void add_shared_dual_constraints(LmiProblem& p, const DualVars& v,
                                 const SubsystemPlant& plant,
                                 const AssemblyOptions& opts);

// Adds the multiplier condition, nominal condition, and Lyapunov positivity
// instantiated at one eigenvalue. In blockdiag mode the nominal condition
// and positivity are eigenvalue-independent; pass add_nominal = false to
// avoid duplicating them.
void add_decomposed_constraints(LmiProblem& p, const DualVars& v,
                                const SubsystemPlant& plant, double lambda,
                                double gamma, const AssemblyOptions& opts,
                                const std::string& tag, bool add_nominal = true);

// Analysis form, full size: variables X (symmetric, PD), Q, R (symmetric),
// S (full); multiplier condition on [PP; I] and the nominal condition with
// the -gamma^2 I / I performance block.
LmiProblem assemble_fbsp_analysis(const ClosedLoopSystem& cl, double gamma,
                                  const AssemblyOptions& opts = {});

// Extended analysis form with slack F: variables X (PD), F, Q, S, R;
// the slack decouples X from the plant matrices.
LmiProblem assemble_primal_efbsp(const ClosedLoopSystem& cl, double gamma,
                                 const AssemblyOptions& opts = {});

// Full-size synthesis form in the substituted variables (Y, F, M, Q, S, R).
// `structured` selects pair-structured variables; otherwise Y and the
// multipliers are unstructured symmetric/full over the whole network.
LmiProblem assemble_dual_efbsp(const ClosedLoopSystem& cl,
                               const HomogeneousSystem& sys, double gamma,
                               bool structured,
                               const AssemblyOptions& opts = {});

// Subsystem-sized synthesis problem at a single eigenvalue.
LmiProblem assemble_decomposed_efbsp(const SubsystemPlant& plant,
                                     double lambda, double gamma,
                                     const AssemblyOptions& opts = {});

// Conjunction over a spectrum, one shared variable set.
LmiProblem assemble_decomposed_conjunction(const SubsystemPlant& plant,
                                           const std::vector<double>& lambdas,
                                           double gamma,
                                           const AssemblyOptions& opts = {});

}  // namespace netsyn
