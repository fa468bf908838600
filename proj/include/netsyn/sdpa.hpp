#pragma once

#include <string>
#include <vector>

#include "netsyn/lmi.hpp"

namespace netsyn {

// One nonzero of matrix `mat` (0 = F0, 1..m = F_i) in sparse SDPA terms.
// block, i, j are 1-based with i <= j.
struct SdpaEntry {
  int mat = 0;
  int block = 0;
  int i = 0;
  int j = 0;
  double value = 0.0;
};

// Sparse SDPA problem: minimize c^T x subject to sum_i x_i F_i - F0 >= 0
// blockwise.
struct SdpaDocument {
  int n_vars = 0;
  std::vector<int> block_sizes;
  std::vector<double> objective;
  std::vector<SdpaEntry> entries;  // sorted by (mat, block, i, j)
};

// Lowers the canonical constraints G0 + sum x_i G_i >= 0 as F0 = -G0,
// F_i = G_i, one block per constraint in declaration order.
SdpaDocument to_sdpa(const LmiProblem& p);

// %.17g rendering; output is deterministic and parse(write(d)) reproduces d
// exactly, so write(parse(write(d))) is byte-stable.
std::string write_sdpa(const SdpaDocument& d);
SdpaDocument parse_sdpa(const std::string& text);

std::string export_sdpa(const LmiProblem& p);

}  // namespace netsyn
