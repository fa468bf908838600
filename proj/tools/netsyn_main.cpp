#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netsyn/analysis.hpp"
#include "netsyn/model.hpp"
#include "netsyn/report.hpp"
#include "netsyn/sdpa.hpp"
#include "netsyn/slalg.hpp"
#include "netsyn/synthesis.hpp"

namespace {

using namespace netsyn;

HomogeneousSystem load_input(const std::string& path) {
  if (std::ifstream probe(path); probe.good()) return load_system_file(path);
  return load_fixture(path);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  f << text;
  if (!f.good()) throw ModelError("cannot write output file: " + out_path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f.good()) throw ModelError("cannot read file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

StructureMode parse_mode(const std::string& s) {
  if (s == "kron") return StructureMode::kron;
  if (s == "blockdiag") return StructureMode::blockdiag;
  return StructureMode::full;
}

struct Flags {
  std::string system;
  std::string out;
  std::string format = "human";
  std::string mode = "kron";
  std::string multiplier = "all";
  double gamma_lo = 1e-4;
  double gamma_hi = 0.0;
  double tol = 1e-4;
  double gamma = 0.0;
  bool rho = false;
  std::string gains;
  std::vector<int> sizes{4, 8, 16};
  std::string name = "paper-sec7";
};

SynthesisOptions synthesis_options(const Flags& fl) {
  SynthesisOptions o;
  o.structure = parse_mode(fl.mode);
  o.multiplier =
      fl.multiplier == "extremes" ? MultiplierMode::extremes : MultiplierMode::all;
  o.gamma_lo = fl.gamma_lo;
  o.gamma_hi = fl.gamma_hi;
  o.bisect_tol = fl.tol;
  o.rho_objective = fl.rho;
  return o;
}

int cmd_synth(const Flags& fl) {
  const HomogeneousSystem sys = load_input(fl.system);
  ClarabelBackend backend;
  const SynthesisResult res = synthesize(sys, backend, synthesis_options(fl));
  const int n = sys.pattern.size();
  std::string text;
  if (fl.format == "csv")
    text = report_csv(res, n);
  else if (fl.format == "structured")
    text = report_json(res, n);
  else
    text = report_human(res, n);
  emit(text, fl.out);
  return 0;
}

int cmd_analyze(const Flags& fl) {
  const HomogeneousSystem sys = load_input(fl.system);
  ControllerGains k{Matrix::Zero(sys.dims.n_u, sys.dims.n),
                    Matrix::Zero(sys.dims.n_u, sys.dims.n)};
  double gamma = fl.gamma;
  const bool from_report = !fl.gains.empty();
  if (from_report) {
    const ParsedReport rep = report_from_json(read_file(fl.gains));
    k = rep.result.gains;
    if (gamma <= 0.0) gamma = rep.result.gamma_certified;
  }
  CertificateReport rep;
  if (gamma > 0.0) {
    rep = verify_certificate(sys, k, gamma);
  } else {
    // No bound requested: report stability and the achieved norm.
    const StateSpace cl = dense_closed_loop(sys, k);
    rep.abscissa = spectral_abscissa(cl.A);
    rep.hurwitz = rep.abscissa < 0.0;
    if (rep.hurwitz) {
      rep.hinf_report = hinf_norm(cl);
      rep.hinf = rep.hinf_report.norm;
      rep.within_bound = true;
    } else {
      rep.hinf = std::numeric_limits<double>::infinity();
    }
  }
  const std::string text =
      fl.format == "structured" ? certificate_json(rep) : certificate_human(rep);
  emit(text, fl.out);
  if (from_report && !rep.ok())
    throw CertificateError("stored gains fail verification: " + rep.summary());
  return 0;
}

int cmd_bench(const Flags& fl) {
  const HomogeneousSystem base = load_input(fl.system);
  std::vector<BenchRow> rows;
  SynthesisOptions o = synthesis_options(fl);
  for (const int n : fl.sizes) {
    if (n < 3) throw ModelError("ring benchmark needs N >= 3");
    HomogeneousSystem sys = base;
    sys.pattern = ring_pattern(n);
    for (const StructureMode mode :
         {StructureMode::kron, StructureMode::full}) {
      BenchRow row;
      row.n = n;
      row.mode = to_string(mode);
      if (mode == StructureMode::full && n > o.full_size_guard) {
        row.skipped = true;
        rows.push_back(row);
        continue;
      }
      o.structure = mode;
      ClarabelBackend backend;
      const SynthesisResult res = synthesize(sys, backend, o);
      row.gamma_certified = res.gamma_certified;
      row.gamma_verified = res.gamma_verified;
      row.seconds = res.seconds;
      rows.push_back(row);
    }
  }
  emit(bench_csv(rows), fl.out);
  return 0;
}

int cmd_export(const Flags& fl) {
  if (!(fl.gamma > 0.0)) throw ModelError("export needs a positive --gamma");
  const HomogeneousSystem sys = load_input(fl.system);
  const std::string prefix = fl.out.empty() ? "problem" : fl.out;
  AssemblyOptions aopts;
  aopts.blockdiag = fl.mode == "blockdiag";
  aopts.extremes = fl.multiplier == "extremes" && fl.mode != "full";
  std::string listing;
  if (fl.mode == "full") {
    const ControllerGains zero{Matrix::Zero(sys.dims.n_u, sys.dims.n),
                               Matrix::Zero(sys.dims.n_u, sys.dims.n)};
    LmiProblem p =
        assemble_dual_efbsp(close_loop(sys, zero), sys, fl.gamma, true, aopts);
    const std::string path = prefix + "-full.dat-s";
    emit(export_sdpa(p), path);
    listing += path + "\n";
  } else {
    const SubsystemPlant plant = subsystem_plant(sys);
    const EigenStructure es = sym_eig(sys.pattern.dense());
    std::vector<double> lambdas = es.distinct;
    if (aopts.extremes && lambdas.size() > 2)
      lambdas = {lambdas.front(), lambdas.back()};
    for (size_t i = 0; i < lambdas.size(); ++i) {
      LmiProblem p =
          assemble_decomposed_efbsp(plant, lambdas[i], fl.gamma, aopts);
      const std::string path = prefix + "-l" + std::to_string(i) + ".dat-s";
      emit(export_sdpa(p), path);
      listing += path + "\n";
    }
  }
  std::fputs(listing.c_str(), stdout);
  return 0;
}

int cmd_fixture(const Flags& fl) {
  const HomogeneousSystem sys = load_fixture(fl.name);
  emit(write_system_json(sys), fl.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed H-infinity state-feedback synthesis for "
               "homogeneous interconnected systems"};
  app.require_subcommand(1);
  Flags fl;

  const auto formats = CLI::IsMember({"human", "csv", "structured"});
  const auto modes = CLI::IsMember({"kron", "blockdiag", "full"});
  const auto multipliers = CLI::IsMember({"all", "extremes"});

  auto add_synth_flags = [&](CLI::App* c) {
    c->add_option("--mode", fl.mode, "variable structure")->check(modes);
    c->add_option("--multiplier", fl.multiplier,
                  "eigenvalues entering the multiplier condition")
        ->check(multipliers);
    c->add_option("--gamma-lo", fl.gamma_lo, "lower bisection bracket");
    c->add_option("--gamma-hi", fl.gamma_hi,
                  "upper bisection bracket (0 = seed automatically)");
    c->add_option("--tol", fl.tol, "relative bisection tolerance");
    c->add_flag("--rho", fl.rho,
                "maximize the performance level in one solve instead of "
                "bisecting");
  };

  CLI::App* synth = app.add_subcommand("synth", "synthesize a distributed gain");
  synth->add_option("system", fl.system, "system file or fixture name")
      ->required();
  synth->add_option("--out", fl.out, "output file (default stdout)");
  synth->add_option("--format", fl.format, "report format")->check(formats);
  add_synth_flags(synth);

  CLI::App* analyze =
      app.add_subcommand("analyze", "verify gains or analyze the open loop");
  analyze->add_option("system", fl.system, "system file or fixture name")
      ->required();
  analyze->add_option("--gains", fl.gains,
                      "structured synthesis report whose gains to verify");
  analyze->add_option("--gamma", fl.gamma, "performance bound to check");
  analyze->add_option("--out", fl.out, "output file (default stdout)");
  analyze->add_option("--format", fl.format, "report format")->check(formats);

  CLI::App* bench = app.add_subcommand(
      "bench", "time decomposed vs full synthesis over ring networks");
  bench->add_option("system", fl.system, "base subsystem donor")->required();
  bench->add_option("--sizes", fl.sizes, "ring sizes")->delimiter(',');
  bench->add_option("--out", fl.out, "output file (default stdout)");
  add_synth_flags(bench);

  CLI::App* exp = app.add_subcommand(
      "export", "write the assembled problems in sparse SDPA format");
  exp->add_option("system", fl.system, "system file or fixture name")
      ->required();
  exp->add_option("--gamma", fl.gamma, "performance level")->required();
  exp->add_option("--out", fl.out, "output path prefix");
  exp->add_option("--mode", fl.mode, "variable structure")->check(modes);
  exp->add_option("--multiplier", fl.multiplier, "eigenvalue selection")
      ->check(multipliers);

  CLI::App* fixture =
      app.add_subcommand("fixture", "emit a bundled example system");
  fixture->add_option("name", fl.name, "fixture name (default paper-sec7)");
  fixture->add_option("--out", fl.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(fl);
    if (analyze->parsed()) return cmd_analyze(fl);
    if (bench->parsed()) return cmd_bench(fl);
    if (exp->parsed()) return cmd_export(fl);
    return cmd_fixture(fl);
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return 2;
  } catch (const CertificateError& e) {
    std::fprintf(stderr, "certificate: %s\n", e.what());
    return 3;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
