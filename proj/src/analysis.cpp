#include "netsyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "netsyn/assemblies.hpp"
#include "netsyn/slalg.hpp"

namespace netsyn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sigma_max(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

double sigma_max_c(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

void check_gains(const HomogeneousSystem& sys, const ControllerGains& k) {
  if (k.K_d.rows() != sys.dims.n_u || k.K_d.cols() != sys.dims.n ||
      k.K_i.rows() != sys.dims.n_u || k.K_i.cols() != sys.dims.n)
    throw ModelError("gain dimensions do not match the system");
}

// True iff some eigenvalue of the Hamiltonian sits on the imaginary axis,
// which certifies gamma < ||G||_inf for gamma > sigma_max(D).
bool hamiltonian_imaginary_eig(const StateSpace& ss, double gamma) {
  const int n = static_cast<int>(ss.A.rows());
  const int m = static_cast<int>(ss.B.cols());
  const Matrix r = gamma * gamma * Matrix::Identity(m, m) -
                   ss.D.transpose() * ss.D;
  Eigen::PartialPivLU<Matrix> lu(r);
  const Matrix r_inv = lu.solve(Matrix::Identity(m, m));
  const Matrix a_hat = ss.A + ss.B * r_inv * ss.D.transpose() * ss.C;
  Matrix h(2 * n, 2 * n);
  h << a_hat, ss.B * r_inv * ss.B.transpose(),
      -ss.C.transpose() *
          (Matrix::Identity(ss.C.rows(), ss.C.rows()) +
           ss.D * r_inv * ss.D.transpose()) *
          ss.C,
      -a_hat.transpose();
  const double scale =
      std::max(1.0, h.cwiseAbs().rowwise().sum().maxCoeff());
  Eigen::EigenSolver<Matrix> es(h, false);
  const auto& ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i).real()) <= 1e-8 * scale) return true;
  return false;
}

struct SweepResult {
  double norm = 0.0;
  double peak = 0.0;  // rad/s, 0 when the feedthrough dominates
};

// 1000-point logarithmic sweep with golden-section refinement around the
// best sample, in log-frequency.
SweepResult frequency_sweep(const StateSpace& ss) {
  SweepResult out;
  double spec = 0.0;
  {
    Eigen::EigenSolver<Matrix> es(ss.A, false);
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      spec = std::max(spec, std::abs(es.eigenvalues()(i)));
  }
  const double s = std::max(1.0, spec);
  const double lo = std::log(1e-4 * s);
  const double hi = std::log(1e4 * s);
  const int points = 1000;
  int best = 0;
  double best_gain = -1.0;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * i / (points - 1));
    const double g = gain_at(ss, grid[i]);
    if (g > best_gain) {
      best_gain = g;
      best = i;
    }
  }
  double a = std::log(grid[std::max(0, best - 1)]);
  double b = std::log(grid[std::min(points - 1, best + 1)]);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = gain_at(ss, std::exp(x1));
  double f2 = gain_at(ss, std::exp(x2));
  for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = gain_at(ss, std::exp(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = gain_at(ss, std::exp(x1));
    }
  }
  out.peak = std::exp(0.5 * (a + b));
  out.norm = std::max({best_gain, f1, f2});
  if (out.norm > best_gain) out.peak = std::exp(f1 > f2 ? x1 : x2);
  const double d_gain = sigma_max(ss.D);
  if (d_gain > out.norm) {
    out.norm = d_gain;
    out.peak = 0.0;
  }
  return out;
}

}  // namespace

Matrix dense_gain(const ControllerGains& k, const PatternGraph& g) {
  const int nn = g.size();
  return kron(Matrix::Identity(nn, nn), k.K_d) + kron(g.dense(), k.K_i);
}

StateSpace dense_closed_loop(const HomogeneousSystem& sys,
                             const ControllerGains& k) {
  require_valid(sys);
  check_gains(sys, k);
  const Matrix kd = dense_gain(k, sys.pattern);
  StateSpace ss;
  ss.A = expand(sys.A, sys.pattern) + expand(sys.B_u, sys.pattern) * kd;
  ss.B = expand(sys.B_w, sys.pattern);
  ss.C = expand(sys.C_z, sys.pattern) + expand(sys.D_zu, sys.pattern) * kd;
  ss.D = expand(sys.D_zw, sys.pattern);
  return ss;
}

double spectral_abscissa(const Matrix& a) {
  if (a.rows() != a.cols()) throw ModelError("spectral abscissa needs square A");
  if (a.rows() == 0) return -kInf;
  Eigen::EigenSolver<Matrix> es(a, false);
  double out = -kInf;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    out = std::max(out, es.eigenvalues()(i).real());
  return out;
}

StateSpace dualize(const StateSpace& ss) {
  return {ss.A.transpose(), ss.C.transpose(), ss.B.transpose(),
          ss.D.transpose()};
}

bool check_wellposed(const ClosedLoopSystem& cl) {
  const Matrix d11 = expand(cl.D11, cl.pattern);
  const Matrix pp = cl.interconnection();
  const Matrix m = Matrix::Identity(d11.rows(), d11.rows()) - d11 * pp;
  return Eigen::FullPivLU<Matrix>(m).isInvertible();
}

double gain_at(const StateSpace& ss, double omega) {
  const int n = static_cast<int>(ss.A.rows());
  if (n == 0 || ss.B.size() == 0 || ss.C.size() == 0) return sigma_max(ss.D);
  const std::complex<double> jw(0.0, omega);
  const Matrix d = ss.D.size() != 0
                       ? ss.D
                       : Matrix::Zero(ss.C.rows(), ss.B.cols()).eval();
  Eigen::MatrixXcd m =
      jw * Eigen::MatrixXcd::Identity(n, n) - ss.A.cast<std::complex<double>>();
  Eigen::MatrixXcd g =
      d.cast<std::complex<double>>() +
      ss.C.cast<std::complex<double>>() *
          m.partialPivLu().solve(ss.B.cast<std::complex<double>>());
  return sigma_max_c(g);
}

HinfReport hinf_norm(const StateSpace& ss, double tol) {
  if (ss.A.rows() != ss.A.cols()) throw ModelError("hinf_norm needs square A");
  if (ss.B.rows() != ss.A.rows() || ss.C.cols() != ss.A.cols() ||
      ss.D.rows() != ss.C.rows() || ss.D.cols() != ss.B.cols())
    throw ModelError("hinf_norm got inconsistent state-space dimensions");

  HinfReport rep;
  rep.method = "hamiltonian-bisection";
  const int n = static_cast<int>(ss.A.rows());
  const double d_gain = sigma_max(ss.D);

  rep.stable = n == 0 || spectral_abscissa(ss.A) < 0.0;
  if (!rep.stable) {
    rep.norm = kInf;
    return rep;
  }
  const bool static_only = n == 0 || ss.B.size() == 0 || ss.C.size() == 0 ||
                           ss.B.isZero(0.0) || ss.C.isZero(0.0);
  if (static_only) {
    rep.norm = d_gain;
    rep.sweep_norm = d_gain;
    rep.cross_checked = true;
    return rep;
  }

  const SweepResult sweep = frequency_sweep(ss);
  rep.sweep_norm = sweep.norm;
  rep.sweep_peak_frequency = sweep.peak;
  rep.peak_frequency = sweep.peak;

  // Every sampled gain is a valid lower bound; the norm is in [lo, hi] once
  // the Hamiltonian test clears hi.
  double lo = std::max(d_gain, sweep.norm);
  if (lo <= 0.0) {
    rep.norm = 0.0;
    rep.cross_checked = true;
    return rep;
  }

  bool ok = true;
  double hi = 2.0 * lo;
  int guard = 0;
  while (hamiltonian_imaginary_eig(ss, hi)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 120) {
      ok = false;
      break;
    }
  }
  if (ok) {
    while (hi / lo - 1.0 > tol) {
      const double g = std::sqrt(lo * hi);
      if (hamiltonian_imaginary_eig(ss, g))
        lo = g;
      else
        hi = g;
    }
    rep.norm = 0.5 * (lo + hi);
  } else {
    rep.method = "frequency-sweep";
    rep.norm = sweep.norm;
  }
  rep.relative_gap =
      std::abs(rep.norm - rep.sweep_norm) / std::max(rep.norm, 1e-12);
  rep.cross_checked = true;
  return rep;
}

std::string CertificateReport::summary() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "abscissa=%.6g hinf=%.6g gamma=%.6g hurwitz=%s bound=%s",
                abscissa, hinf, gamma, hurwitz ? "yes" : "no",
                within_bound ? "holds" : "violated");
  return buf;
}

CertificateReport verify_certificate(const HomogeneousSystem& sys,
                                     const ControllerGains& k, double gamma,
                                     SolverBackend* backend,
                                     const CertificateOptions& opts) {
  if (!(gamma > 0.0)) throw ModelError("gamma must be positive");
  require_valid(sys);
  check_gains(sys, k);

  CertificateReport rep;
  rep.gamma = gamma;
  const StateSpace cl = dense_closed_loop(sys, k);
  rep.abscissa = spectral_abscissa(cl.A);
  rep.hurwitz = rep.abscissa < 0.0;
  if (rep.hurwitz) {
    rep.hinf_report = hinf_norm(cl);
    rep.hinf = rep.hinf_report.norm;
  } else {
    rep.hinf = kInf;
    rep.hinf_report.norm = kInf;
    rep.hinf_report.stable = false;
  }
  rep.within_bound = rep.hurwitz && rep.hinf <= gamma * (1.0 + 1e-6);

  const int size = sys.pattern.size() * sys.dims.n_q();
  if (backend != nullptr && opts.advisory_lmi && rep.hurwitz &&
      size <= opts.advisory_size_cap && lft_exact(sys)) {
    const ClosedLoopSystem skel = close_loop(sys, k);
    const double g_adv = gamma * (1.0 + opts.advisory_gamma_slack);
    {
      LmiProblem p = assemble_fbsp_analysis(skel, g_adv);
      rep.analysis_lmi_status = to_string(solve(p, *backend).status);
    }
    {
      LmiProblem p = assemble_primal_efbsp(skel, g_adv);
      rep.slack_lmi_status = to_string(solve(p, *backend).status);
    }
  }
  return rep;
}

}  // namespace netsyn
