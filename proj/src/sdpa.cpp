#include "netsyn/sdpa.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace netsyn {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool entry_less(const SdpaEntry& a, const SdpaEntry& b) {
  if (a.mat != b.mat) return a.mat < b.mat;
  if (a.block != b.block) return a.block < b.block;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

// Strips SDPA comments and separators; returns whitespace-delimited tokens.
std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && (line[0] == '"' || line[0] == '*')) continue;
    for (char& c : line)
      if (c == ',' || c == '(' || c == ')' || c == '{' || c == '}') c = ' ';
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  return tokens;
}

}  // namespace

SdpaDocument to_sdpa(const LmiProblem& p) {
  SdpaDocument doc;
  doc.n_vars = p.vars().num_scalars();
  doc.objective.assign(static_cast<size_t>(doc.n_vars), 0.0);
  if (p.has_objective()) {
    Vector c = p.objective_vector();
    for (int k = 0; k < c.size(); ++k) doc.objective[static_cast<size_t>(k)] = c[k];
  }

  int block = 0;
  for (const auto& cons : p.constraints()) {
    ++block;
    const int d = cons.canonical.rows();
    doc.block_sizes.push_back(d);
    const Matrix& g0 = cons.canonical.constant();
    for (int j = 0; j < d; ++j)
      for (int i = 0; i <= j; ++i)
        if (g0(i, j) != 0.0)
          doc.entries.push_back({0, block, i + 1, j + 1, -g0(i, j)});
    for (const auto& [k, m] : cons.canonical.coeffs())
      for (int j = 0; j < d; ++j)
        for (int i = 0; i <= j; ++i)
          if (m(i, j) != 0.0)
            doc.entries.push_back({k + 1, block, i + 1, j + 1, m(i, j)});
  }
  std::sort(doc.entries.begin(), doc.entries.end(), entry_less);
  return doc;
}

std::string write_sdpa(const SdpaDocument& d) {
  std::ostringstream os;
  os << "\"LMI problem in sparse SDPA format\"\n";
  os << d.n_vars << " = mDIM\n";
  os << d.block_sizes.size() << " = nBLOCK\n";
  for (size_t i = 0; i < d.block_sizes.size(); ++i)
    os << d.block_sizes[i] << (i + 1 < d.block_sizes.size() ? " " : "");
  os << " = bLOCKsTRUCT\n";
  for (size_t i = 0; i < d.objective.size(); ++i)
    os << fmt(d.objective[i]) << (i + 1 < d.objective.size() ? " " : "");
  os << "\n";

  std::vector<SdpaEntry> entries = d.entries;
  std::sort(entries.begin(), entries.end(), entry_less);
  for (const auto& e : entries)
    os << e.mat << " " << e.block << " " << e.i << " " << e.j << " "
       << fmt(e.value) << "\n";
  return os.str();
}

SdpaDocument parse_sdpa(const std::string& text) {
  std::vector<std::string> tokens = tokenize(text);
  size_t pos = 0;
  auto next = [&tokens, &pos](const char* what) -> const std::string& {
    if (pos >= tokens.size())
      throw std::runtime_error(std::string("SDPA parse: missing ") + what);
    return tokens[pos++];
  };
  auto to_int = [](const std::string& t, const char* what) {
    try {
      size_t used = 0;
      int v = std::stoi(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error(std::string("SDPA parse: bad integer for ") +
                               what + ": " + t);
    }
  };
  auto to_double = [](const std::string& t, const char* what) {
    try {
      size_t used = 0;
      double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error(std::string("SDPA parse: bad number for ") +
                               what + ": " + t);
    }
  };

  // Metadata tokens like "= mDIM" may or may not survive tokenization of
  // hand-edited files; accept both bare numbers and annotated lines.
  auto next_int = [&](const char* what) {
    std::string t = next(what);
    while (t == "=" || t == "mDIM" || t == "nBLOCK" || t == "bLOCKsTRUCT")
      t = next(what);
    return to_int(t, what);
  };

  SdpaDocument doc;
  doc.n_vars = next_int("mDIM");
  const int n_block = next_int("nBLOCK");
  if (doc.n_vars < 0 || n_block < 0)
    throw std::runtime_error("SDPA parse: negative header counts");
  for (int b = 0; b < n_block; ++b)
    doc.block_sizes.push_back(next_int("bLOCKsTRUCT"));
  {
    // Skip the bLOCKsTRUCT annotation if present.
    while (pos < tokens.size() &&
           (tokens[pos] == "=" || tokens[pos] == "bLOCKsTRUCT"))
      ++pos;
  }
  for (int k = 0; k < doc.n_vars; ++k)
    doc.objective.push_back(to_double(next("objective"), "objective"));

  while (pos < tokens.size()) {
    if (pos + 5 > tokens.size())
      throw std::runtime_error("SDPA parse: truncated entry");
    SdpaEntry e;
    e.mat = to_int(tokens[pos++], "entry matrix");
    e.block = to_int(tokens[pos++], "entry block");
    e.i = to_int(tokens[pos++], "entry row");
    e.j = to_int(tokens[pos++], "entry column");
    e.value = to_double(tokens[pos++], "entry value");
    if (e.mat < 0 || e.mat > doc.n_vars)
      throw std::runtime_error("SDPA parse: entry matrix index out of range");
    if (e.block < 1 || e.block > n_block)
      throw std::runtime_error("SDPA parse: entry block index out of range");
    const int d = doc.block_sizes[static_cast<size_t>(e.block - 1)];
    if (e.i < 1 || e.j < e.i || e.j > d)
      throw std::runtime_error("SDPA parse: entry position out of range");
    doc.entries.push_back(e);
  }
  std::sort(doc.entries.begin(), doc.entries.end(), entry_less);
  return doc;
}

std::string export_sdpa(const LmiProblem& p) { return write_sdpa(to_sdpa(p)); }

}  // namespace netsyn
