#include "netsyn/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace netsyn {
namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// JSON has no inf/nan literals; encode them as strings so every double
// round-trips.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double as_num(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

json mat(const Matrix& m) {
  json out;
  out["rows"] = static_cast<int>(m.rows());
  out["cols"] = static_cast<int>(m.cols());
  json data = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    data.push_back(row);
  }
  out["data"] = data;
  return out;
}

Matrix as_mat(const json& j) {
  const int r = j.at("rows").get<int>();
  const int c = j.at("cols").get<int>();
  Matrix m = Matrix::Zero(r, c);
  const json& data = j.at("data");
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) m(i, k) = as_num(data.at(i).at(k));
  return m;
}

SolveStatus status_from(const std::string& s) {
  if (s == "feasible") return SolveStatus::feasible;
  if (s == "infeasible") return SolveStatus::infeasible;
  if (s == "inaccurate") return SolveStatus::inaccurate;
  return SolveStatus::failed;
}

json certificate_to_json(const CertificateReport& r) {
  json out;
  out["hurwitz"] = r.hurwitz;
  out["abscissa"] = num(r.abscissa);
  out["hinf"] = num(r.hinf);
  out["gamma"] = num(r.gamma);
  out["within_bound"] = r.within_bound;
  json h;
  h["norm"] = num(r.hinf_report.norm);
  h["stable"] = r.hinf_report.stable;
  h["method"] = r.hinf_report.method;
  h["peak_frequency"] = num(r.hinf_report.peak_frequency);
  h["sweep_norm"] = num(r.hinf_report.sweep_norm);
  h["sweep_peak_frequency"] = num(r.hinf_report.sweep_peak_frequency);
  h["relative_gap"] = num(r.hinf_report.relative_gap);
  h["cross_checked"] = r.hinf_report.cross_checked;
  out["hinf_report"] = h;
  out["analysis_lmi_status"] = r.analysis_lmi_status;
  out["slack_lmi_status"] = r.slack_lmi_status;
  return out;
}

CertificateReport certificate_from_json(const json& j) {
  CertificateReport r;
  r.hurwitz = j.at("hurwitz").get<bool>();
  r.abscissa = as_num(j.at("abscissa"));
  r.hinf = as_num(j.at("hinf"));
  r.gamma = as_num(j.at("gamma"));
  r.within_bound = j.at("within_bound").get<bool>();
  const json& h = j.at("hinf_report");
  r.hinf_report.norm = as_num(h.at("norm"));
  r.hinf_report.stable = h.at("stable").get<bool>();
  r.hinf_report.method = h.at("method").get<std::string>();
  r.hinf_report.peak_frequency = as_num(h.at("peak_frequency"));
  r.hinf_report.sweep_norm = as_num(h.at("sweep_norm"));
  r.hinf_report.sweep_peak_frequency = as_num(h.at("sweep_peak_frequency"));
  r.hinf_report.relative_gap = as_num(h.at("relative_gap"));
  r.hinf_report.cross_checked = h.at("cross_checked").get<bool>();
  r.analysis_lmi_status = j.at("analysis_lmi_status").get<std::string>();
  r.slack_lmi_status = j.at("slack_lmi_status").get<std::string>();
  return r;
}

}  // namespace

std::string report_human(const SynthesisResult& r, int n) {
  std::ostringstream os;
  os << "synthesis: structure=" << to_string(r.structure)
     << " multiplier=" << to_string(r.multiplier) << " N=" << n << "\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "gamma_certified = %.10g\ngamma_verified  = %.10g\n",
                r.gamma_certified, r.gamma_verified);
  os << buf;
  os << "K_d =";
  for (int i = 0; i < r.gains.K_d.rows(); ++i) {
    os << (i == 0 ? " [" : "; ");
    for (int j = 0; j < r.gains.K_d.cols(); ++j)
      os << (j ? ", " : "") << r.gains.K_d(i, j);
  }
  os << "]\nK_i =";
  for (int i = 0; i < r.gains.K_i.rows(); ++i) {
    os << (i == 0 ? " [" : "; ");
    for (int j = 0; j < r.gains.K_i.cols(); ++j)
      os << (j ? ", " : "") << r.gains.K_i(i, j);
  }
  os << "]\n";
  os << "per-eigenvalue margins:\n";
  for (const auto& pe : r.per_eigenvalue) {
    std::snprintf(buf, sizeof(buf),
                  "  lambda=%- .6g mult=%d mc=%.3g nc=%.3g y=%.3g\n", pe.lambda,
                  pe.multiplicity, pe.mc_margin, pe.nc_margin, pe.y_margin);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "probes: %zu  synth: %.3fs  verify: %.3fs\n", r.trace.size(),
                r.seconds, r.seconds_verify);
  os << buf;
  if (r.verification.gamma > 0.0)
    os << "verification: " << r.verification.summary() << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

std::string report_csv(const SynthesisResult& r, int n) {
  std::string out = "n,mode,gamma_certified,gamma_verified,seconds\n";
  out += std::to_string(n) + "," + to_string(r.structure) + "," +
         fmt(r.gamma_certified) + "," + fmt(r.gamma_verified) + "," +
         fmt(r.seconds) + "\n";
  return out;
}

std::string report_json(const SynthesisResult& r, int n) {
  json out;
  out["n"] = n;
  out["structure"] = to_string(r.structure);
  out["multiplier"] = to_string(r.multiplier);
  out["gamma_certified"] = num(r.gamma_certified);
  out["gamma_verified"] = num(r.gamma_verified);
  json gains;
  gains["K_d"] = mat(r.gains.K_d);
  gains["K_i"] = mat(r.gains.K_i);
  out["gains"] = gains;
  json pes = json::array();
  for (const auto& pe : r.per_eigenvalue) {
    json e;
    e["lambda"] = num(pe.lambda);
    e["multiplicity"] = pe.multiplicity;
    e["mc_margin"] = num(pe.mc_margin);
    e["nc_margin"] = num(pe.nc_margin);
    e["y_margin"] = num(pe.y_margin);
    pes.push_back(e);
  }
  out["per_eigenvalue"] = pes;
  json trace = json::array();
  for (const auto& t : r.trace) {
    json e;
    e["gamma"] = num(t.gamma);
    e["feasible"] = t.feasible;
    e["status"] = to_string(t.status);
    e["residual"] = num(t.residual);
    e["seconds"] = num(t.seconds);
    trace.push_back(e);
  }
  out["trace"] = trace;
  json vars;
  for (const auto& [name, m] : r.variables) vars[name] = mat(m);
  out["variables"] = vars;
  out["verification"] = certificate_to_json(r.verification);
  out["seconds"] = num(r.seconds);
  out["seconds_verify"] = num(r.seconds_verify);
  out["warnings"] = r.warnings;
  return out.dump(2) + "\n";
}

ParsedReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("report parse failed: ") + e.what());
  }
  try {
    ParsedReport out;
    out.n = j.at("n").get<int>();
    SynthesisResult& r = out.result;
    const std::string st = j.at("structure").get<std::string>();
    r.structure = st == "kron" ? StructureMode::kron
                  : st == "blockdiag" ? StructureMode::blockdiag
                                      : StructureMode::full;
    r.multiplier = j.at("multiplier").get<std::string>() == "all"
                       ? MultiplierMode::all
                       : MultiplierMode::extremes;
    r.gamma_certified = as_num(j.at("gamma_certified"));
    r.gamma_verified = as_num(j.at("gamma_verified"));
    r.gains.K_d = as_mat(j.at("gains").at("K_d"));
    r.gains.K_i = as_mat(j.at("gains").at("K_i"));
    for (const auto& e : j.at("per_eigenvalue")) {
      PerEigenvalue pe;
      pe.lambda = as_num(e.at("lambda"));
      pe.multiplicity = e.at("multiplicity").get<int>();
      pe.mc_margin = as_num(e.at("mc_margin"));
      pe.nc_margin = as_num(e.at("nc_margin"));
      pe.y_margin = as_num(e.at("y_margin"));
      r.per_eigenvalue.push_back(pe);
    }
    for (const auto& e : j.at("trace")) {
      ProbeRecord t;
      t.gamma = as_num(e.at("gamma"));
      t.feasible = e.at("feasible").get<bool>();
      t.status = status_from(e.at("status").get<std::string>());
      t.residual = as_num(e.at("residual"));
      t.seconds = as_num(e.at("seconds"));
      r.trace.push_back(t);
    }
    for (const auto& [name, m] : j.at("variables").items())
      r.variables[name] = as_mat(m);
    r.verification = certificate_from_json(j.at("verification"));
    r.seconds = as_num(j.at("seconds"));
    r.seconds_verify = as_num(j.at("seconds_verify"));
    for (const auto& w : j.at("warnings"))
      r.warnings.push_back(w.get<std::string>());
    return out;
  } catch (const json::exception& e) {
    throw ModelError(std::string("report is missing fields: ") + e.what());
  }
}

std::string certificate_human(const CertificateReport& r) {
  std::ostringstream os;
  os << "certificate: " << r.summary() << "\n";
  if (r.hinf_report.cross_checked) {
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "hinf: method=%s norm=%.10g sweep=%.10g gap=%.3g peak=%.6g\n",
                  r.hinf_report.method.c_str(), r.hinf_report.norm,
                  r.hinf_report.sweep_norm, r.hinf_report.relative_gap,
                  r.hinf_report.peak_frequency);
    os << buf;
  }
  if (!r.analysis_lmi_status.empty())
    os << "analysis LMI: " << r.analysis_lmi_status
       << "  slack LMI: " << r.slack_lmi_status << "\n";
  return os.str();
}

std::string certificate_json(const CertificateReport& r) {
  return certificate_to_json(r).dump(2) + "\n";
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "n,mode,gamma_certified,gamma_verified,seconds\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + r.mode + ",";
    if (r.skipped) {
      out += "skipped,skipped,skipped\n";
    } else {
      out += fmt(r.gamma_certified) + "," + fmt(r.gamma_verified) + "," +
             fmt(r.seconds) + "\n";
    }
  }
  return out;
}

}  // namespace netsyn
