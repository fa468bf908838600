#include "netsyn/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "netsyn/slalg.hpp"

namespace netsyn {
namespace {

double seconds_since(
    const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

double min_eig(const Matrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix assignment_part(const std::map<std::string, Matrix>& a,
                       const std::string& base, int which, int rows,
                       int cols) {
  auto it = a.find(base + (which == 0 ? ".d" : ".i"));
  if (it != a.end()) return it->second;
  if (which == 0) {
    it = a.find(base);
    if (it != a.end()) return it->second;
  }
  return Matrix::Zero(rows, cols);
}

}  // namespace

std::string to_string(StructureMode m) {
  switch (m) {
    case StructureMode::kron: return "kron";
    case StructureMode::blockdiag: return "blockdiag";
    case StructureMode::full: return "full";
  }
  return "?";
}

std::string to_string(MultiplierMode m) {
  return m == MultiplierMode::all ? "all" : "extremes";
}

BisectResult bisect_gamma(const std::function<bool(double)>& feasible_at,
                          double lo, double hi, double tol) {
  if (!(lo > 0.0) || !(hi > lo))
    throw ModelError("bisection bracket must satisfy 0 < lo < hi");
  if (!(tol > 0.0)) throw ModelError("bisection tolerance must be positive");

  BisectResult out;
  const bool hi_ok = feasible_at(hi);
  out.trace.emplace_back(hi, hi_ok);
  if (!hi_ok) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "infeasible at the upper bracket gamma=%g",
                  hi);
    throw InfeasibleError(buf);
  }
  const bool lo_ok = feasible_at(lo);
  out.trace.emplace_back(lo, lo_ok);
  if (lo_ok) {
    out.gamma = lo;
  } else {
    while (hi / lo - 1.0 > tol) {
      const double mid = std::sqrt(lo * hi);
      const bool ok = feasible_at(mid);
      out.trace.emplace_back(mid, ok);
      if (ok)
        hi = mid;
      else
        lo = mid;
    }
    out.gamma = hi;
  }

  // Feasibility should be monotone in gamma; a violation points at solver
  // noise near the boundary and is reported, not fatal.
  std::vector<std::pair<double, bool>> sorted = out.trace;
  std::sort(sorted.begin(), sorted.end());
  bool seen_feasible = false;
  for (const auto& [g, ok] : sorted) {
    if (ok) {
      seen_feasible = true;
    } else if (seen_feasible) {
      out.monotone = false;
      out.warnings.push_back(
          "feasibility was not monotone across the probed gamma values");
      break;
    }
  }
  return out;
}

ControllerGains recover_gains(const Matrix& m_d, const Matrix& f_d,
                              const Dimensions& dims, double cond_limit) {
  if (f_d.rows() != dims.n || f_d.cols() != dims.n)
    throw ModelError("slack matrix must be n x n");
  if (m_d.rows() != 2 * dims.n_u || m_d.cols() != dims.n)
    throw ModelError("substitution matrix must be 2*n_u x n");

  Eigen::JacobiSVD<Matrix> svd(f_d);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double cond = smin > 0.0 ? smax / smin
                                 : std::numeric_limits<double>::infinity();
  if (!(cond <= cond_limit)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "gain recovery rejected: cond(F) = %.3g exceeds %.3g", cond,
                  cond_limit);
    throw CertificateError(buf);
  }
  // K_hat F = M  =>  F^T K_hat^T = M^T.
  const Matrix k_hat =
      f_d.transpose().partialPivLu().solve(m_d.transpose()).transpose();
  ControllerGains k;
  k.K_d = k_hat.topRows(dims.n_u);
  k.K_i = k_hat.bottomRows(dims.n_u);
  return k;
}

SynthesisResult synthesize(const HomogeneousSystem& sys, SolverBackend& backend,
                           const SynthesisOptions& opts) {
  require_valid(sys);
  const auto t0 = std::chrono::steady_clock::now();

  SynthesisResult res;
  res.structure = opts.structure;
  res.multiplier = opts.multiplier;

  AssemblyOptions aopts;
  aopts.eps_scale = opts.eps_scale;
  aopts.blockdiag = opts.structure == StructureMode::blockdiag;
  aopts.extremes =
      opts.multiplier == MultiplierMode::extremes &&
      opts.structure != StructureMode::full;
  if (opts.multiplier == MultiplierMode::extremes &&
      opts.structure == StructureMode::full) {
    res.multiplier = MultiplierMode::all;
    res.warnings.push_back(
        "the extremes multiplier option only applies to the decomposed path; "
        "using all eigenvalues");
  }

  const SubsystemPlant plant = subsystem_plant(sys);
  const Dimensions& dims = sys.dims;
  const int nn = sys.pattern.size();

  const EigenStructure es = sym_eig(sys.pattern.dense());
  std::vector<double> enforced = es.distinct;
  if (aopts.extremes && enforced.size() > 2)
    enforced = {enforced.front(), enforced.back()};

  if (opts.structure == StructureMode::full && nn > opts.full_size_guard) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "full-size path is guarded to N <= %d (got N = %d)",
                  opts.full_size_guard, nn);
    throw ModelError(buf);
  }
  ClosedLoopSystem skeleton;
  if (opts.structure == StructureMode::full) {
    const ControllerGains zero{Matrix::Zero(dims.n_u, dims.n),
                               Matrix::Zero(dims.n_u, dims.n)};
    skeleton = close_loop(sys, zero);
  }

  SolveOutcome stash;
  bool have_stash = false;

  auto build = [&](double gamma) {
    if (opts.structure == StructureMode::full)
      return assemble_dual_efbsp(skeleton, sys, gamma, true, aopts);
    return assemble_decomposed_conjunction(plant, enforced, gamma, aopts);
  };

  auto probe = [&](double gamma) {
    const auto tp = std::chrono::steady_clock::now();
    LmiProblem p = build(gamma);
    const SolveOutcome o = solve(p, backend, opts.solver);
    ProbeRecord rec;
    rec.gamma = gamma;
    rec.feasible = o.feasible();
    rec.status = o.status;
    rec.residual = o.residual;
    rec.seconds = seconds_since(tp);
    res.trace.push_back(rec);
    if (o.status == SolveStatus::failed) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "solver failure at gamma=%g treated as infeasible", gamma);
      res.warnings.push_back(buf);
    }
    if (o.feasible()) {
      stash = o;
      have_stash = true;
    }
    return o.feasible();
  };

  if (opts.rho_objective) {
    aopts.rho_objective = true;
    aopts.rho_gamma_floor = opts.gamma_lo;
    const auto tp = std::chrono::steady_clock::now();
    LmiProblem p = build(1.0);
    const SolveOutcome o = solve(p, backend, opts.solver);
    if (!o.feasible())
      throw InfeasibleError("the performance maximization did not return a "
                            "feasible point (" + to_string(o.status) + ")");
    const auto it = o.assignment.find("rho");
    if (it == o.assignment.end() || it->second.size() != 1)
      throw CertificateError("solver returned no performance level");
    const double rho = it->second(0, 0);
    if (!(rho > 0.0))
      throw InfeasibleError("the performance maximization stalled at rho <= 0");
    res.gamma_certified = 1.0 / std::sqrt(rho);
    stash = o;
    have_stash = true;
    ProbeRecord rec;
    rec.gamma = res.gamma_certified;
    rec.feasible = true;
    rec.status = o.status;
    rec.residual = o.residual;
    rec.seconds = seconds_since(tp);
    res.trace.push_back(rec);
  } else {
    double hi = opts.gamma_hi;
    if (hi <= 0.0) {
      const ControllerGains zero{Matrix::Zero(dims.n_u, dims.n),
                                 Matrix::Zero(dims.n_u, dims.n)};
      const StateSpace open_loop = dense_closed_loop(sys, zero);
      const HinfReport rep = hinf_norm(open_loop);
      hi = rep.stable && rep.norm > 0.0 ? 1e3 * rep.norm : 1e6;
    }
    hi = std::max(hi, 10.0 * opts.gamma_lo);
    BisectResult b = bisect_gamma(probe, opts.gamma_lo, hi, opts.bisect_tol);
    res.gamma_certified = b.gamma;
    for (auto& w : b.warnings) res.warnings.push_back(std::move(w));
  }

  if (!have_stash)
    throw InfeasibleError("no feasible point was recorded");  // unreachable

  const Matrix m_d = assignment_part(stash.assignment, "M", 0, 2 * dims.n_u,
                                     dims.n);
  const Matrix f_d = assignment_part(stash.assignment, "F", 0, dims.n, dims.n);
  res.gains = recover_gains(m_d, f_d, dims, opts.cond_limit);
  res.variables = stash.assignment;

  // Per-eigenvalue margins of the final certificate, evaluated on a fresh
  // instantiation over the whole spectrum (the variable layout is shared).
  {
    LmiProblem evalp = assemble_decomposed_conjunction(
        plant, es.distinct, opts.rho_objective ? 1.0 : res.gamma_certified,
        aopts);
    const int nq = dims.n_q();
    MultiplierAssignment ma;
    ma.Q_d = assignment_part(stash.assignment, "Qt", 0, nq, nq);
    ma.Q_i = assignment_part(stash.assignment, "Qt", 1, nq, nq);
    ma.S_d = assignment_part(stash.assignment, "St", 0, nq, nq);
    ma.S_i = assignment_part(stash.assignment, "St", 1, nq, nq);
    ma.R_d = assignment_part(stash.assignment, "Rt", 0, nq, nq);
    ma.R_i = assignment_part(stash.assignment, "Rt", 1, nq, nq);
    const Matrix y_d = assignment_part(stash.assignment, "Y", 0, dims.n,
                                       dims.n);
    const Matrix y_i = assignment_part(stash.assignment, "Y", 1, dims.n,
                                       dims.n);
    for (size_t i = 0; i < es.distinct.size(); ++i) {
      PerEigenvalue pe;
      pe.lambda = es.distinct[i];
      pe.multiplicity = es.multiplicity[i];
      pe.mc_margin = min_eig(-dual_mc_at(pe.lambda, ma));
      const std::string nc_name =
          aopts.blockdiag ? "nc@l0" : "nc@l" + std::to_string(i);
      if (const LmiConstraint* c = evalp.find_constraint(nc_name))
        pe.nc_margin = min_eig(c->canonical.eval(stash.x)) + c->eps;
      pe.y_margin = min_eig(y_d + pe.lambda * y_i);
      res.per_eigenvalue.push_back(pe);
    }
  }

  res.seconds = seconds_since(t0);

  if (opts.verify) {
    const auto tv = std::chrono::steady_clock::now();
    CertificateOptions copts;
    copts.advisory_lmi = opts.advisory_verify;
    res.verification = verify_certificate(
        sys, res.gains, res.gamma_certified,
        opts.advisory_verify ? &backend : nullptr, copts);
    res.gamma_verified = res.verification.hinf;
    res.seconds_verify = seconds_since(tv);
    if (!res.verification.ok())
      throw CertificateError("certificate verification rejected the result: " +
                             res.verification.summary());
  }
  return res;
}

PatternGraph find_commuting_pattern(const PatternGraph& g) {
  const int nn = g.size();
  if (nn > 8)
    throw ModelError("commuting-pattern search is guarded to N <= 8");
  const int nbits = nn * (nn - 1) / 2;

  std::vector<std::pair<int, int>> pos;
  pos.reserve(nbits);
  Eigen::MatrixXi bit_index = Eigen::MatrixXi::Constant(nn, nn, -1);
  for (int i = 0; i < nn; ++i)
    for (int j = i + 1; j < nn; ++j) {
      bit_index(i, j) = static_cast<int>(pos.size());
      bit_index(j, i) = static_cast<int>(pos.size());
      pos.emplace_back(i, j);
    }

  const Eigen::MatrixXi& p = g.adjacency;
  std::vector<int> given(nbits);
  for (int k = 0; k < nbits; ++k) given[k] = p(pos[k].first, pos[k].second);

  std::vector<int> assign(nbits, -1);
  std::vector<int> best;
  int best_edges = -1;

  // Entry of P1 under the partial assignment: 0/1 when decided, -1 unknown.
  auto entry = [&](int a, int b) -> int {
    if (a == b) return 0;
    return assign[bit_index(a, b)];
  };
  // Interval bound on each commutator entry; unknown bits range over [0, 1].
  auto consistent = [&]() {
    for (int i = 0; i < nn; ++i)
      for (int j = i + 1; j < nn; ++j) {
        int lo = 0;
        int hi = 0;
        for (int k = 0; k < nn; ++k) {
          if (p(i, k) != 0) {
            const int v = entry(k, j);
            if (v >= 0) {
              lo += v;
              hi += v;
            } else {
              hi += 1;
            }
          }
          if (p(k, j) != 0) {
            const int v = entry(i, k);
            if (v >= 0) {
              lo -= v;
              hi -= v;
            } else {
              lo -= 1;
            }
          }
        }
        if (lo > 0 || hi < 0) return false;
      }
    return true;
  };

  std::function<void(int, int)> dfs = [&](int k, int edges) {
    if (edges + (nbits - k) < best_edges) return;
    if (k == nbits) {
      if (assign == given) return;
      if (edges > best_edges ||
          (edges == best_edges &&
           std::lexicographical_compare(assign.begin(), assign.end(),
                                        best.begin(), best.end()))) {
        best_edges = edges;
        best = assign;
      }
      return;
    }
    for (const int v : {1, 0}) {
      assign[k] = v;
      if (consistent()) dfs(k + 1, edges + v);
    }
    assign[k] = -1;
  };
  dfs(0, 0);

  if (best_edges < 0)
    throw ModelError("no commuting pattern distinct from the input exists");
  Eigen::MatrixXi out = Eigen::MatrixXi::Zero(nn, nn);
  for (int k = 0; k < nbits; ++k)
    if (best[k] != 0) {
      out(pos[k].first, pos[k].second) = 1;
      out(pos[k].second, pos[k].first) = 1;
    }
  return make_pattern(out);
}

}  // namespace netsyn
