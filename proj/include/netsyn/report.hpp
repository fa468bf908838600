#pragma once

#include <string>
#include <vector>

#include "netsyn/analysis.hpp"
#include "netsyn/synthesis.hpp"

namespace netsyn {

// n is the network size the run was for (first CSV column).
std::string report_human(const SynthesisResult& r, int n);
std::string report_csv(const SynthesisResult& r, int n);
std::string report_json(const SynthesisResult& r, int n);

// Parses report_json output; numeric values round-trip exactly.
struct ParsedReport {
  int n = 0;
  SynthesisResult result;
};
ParsedReport report_from_json(const std::string& text);

std::string certificate_human(const CertificateReport& r);
std::string certificate_json(const CertificateReport& r);

struct BenchRow {
  int n = 0;
  std::string mode;
  double gamma_certified = 0.0;
  double gamma_verified = 0.0;
  double seconds = 0.0;
  bool skipped = false;
};

// Fixed columns: n,mode,gamma_certified,gamma_verified,seconds. Skipped rows
// carry the literal "skipped" in the numeric cells.
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace netsyn
