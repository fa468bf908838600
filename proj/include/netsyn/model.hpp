#pragma once

#include <string>
#include <vector>

#include "netsyn/types.hpp"

namespace netsyn {

// Undirected interaction graph on N subsystems. Adjacency entries are kept
// as integers so symmetry and binarity checks are exact.
struct PatternGraph {
  Eigen::MatrixXi adjacency;

  int size() const { return static_cast<int>(adjacency.rows()); }
  Matrix dense() const { return adjacency.cast<double>(); }
};

// Validates symmetry, zero diagonal, and {0,1} entries.
PatternGraph make_pattern(const Eigen::MatrixXi& adjacency);

// Cycle graph on n >= 2 nodes (n == 2 degenerates to a single edge).
PatternGraph ring_pattern(int n);

// Pair (d, i) standing for the expanded matrix I_N (x) d + P (x) i.
struct DecomposableMatrix {
  Matrix d;
  Matrix i;

  static DecomposableMatrix diag_only(Matrix d_part);
  static DecomposableMatrix zero(int rows, int cols);
};

// Per-subsystem signal sizes. The interconnection channel carries
// q_h = [x_h; u_h], so its width is n + n_u on both sides.
struct Dimensions {
  int n = 0;
  int n_u = 0;
  int n_y = 0;
  int n_w = 0;
  int n_z = 0;

  int n_q() const { return n + n_u; }
  int n_p() const { return n + n_u; }
};

// Homogeneous network: every global matrix is I (x) M_d + P (x) M_i.
struct HomogeneousSystem {
  PatternGraph pattern;
  Dimensions dims;
  DecomposableMatrix A, B_u, B_w, C_y, D_yw, C_z, D_zu, D_zw;
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

// Checks the pattern invariants, the zero local feedthrough D_zw^d, and the
// shape consistency of every block. Never throws.
ValidationReport validate(const HomogeneousSystem& sys);

// Throws ModelError listing all violations when validate() fails.
void require_valid(const HomogeneousSystem& sys);

// True when the channel model reproduces the network exactly: couplings enter
// only through A^i and C_z^i (B_u^i = B_w^i = D_zu^i = D_zw^i = 0). Outside
// this class the closed-loop LFT is a formal construction and certificates
// are rejected by verification instead.
bool lft_exact(const HomogeneousSystem& sys);

// Distributed static state feedback u = (I (x) K_d + P (x) K_i) x.
struct ControllerGains {
  Matrix K_d;
  Matrix K_i;
};

// Open-loop blocks of one subsystem with the channel q_h = [x_h; u_h]:
//   B_p = [A^i, B_u^i], D_yp = [C_y^i, 0], D_zp = [C_z^i, D_zu^i],
//   C_q = [I; 0], D_qu = [0; I], D_qw = 0.
struct SubsystemPlant {
  Matrix A, B_u, B_w, B_p;
  Matrix C_y, D_yu, D_yw, D_yp;
  Matrix C_z, D_zu, D_zw, D_zp;
  Matrix C_q, D_qu, D_qw;
};

SubsystemPlant subsystem_plant(const HomogeneousSystem& sys);

// I_N (x) m.d + P (x) m.i.
Matrix expand(const DecomposableMatrix& m, const PatternGraph& g);

// P (x) I_{n_q}.
Matrix interconnection_matrix(const PatternGraph& g, int n_q);

// Closed-loop LFT of the network under distributed state feedback. All nine
// blocks are block-diagonal (zero inter part); D11 and D22 are exactly zero.
struct ClosedLoopSystem {
  PatternGraph pattern;
  Dimensions dims;
  DecomposableMatrix A, B1, B2, C1, D11, D12, C2, D21, D22;

  Matrix interconnection() const;  // P (x) I_{n_q}
};

ClosedLoopSystem close_loop(const HomogeneousSystem& sys,
                            const ControllerGains& k);

// JSON system description:
//   {"pattern": [[..]], "dims": {...}, "A": {"d": [[..]], "i": [[..]]}, ...}
// Omitted "i" blocks mean zero. Values survive a round-trip unchanged.
HomogeneousSystem read_system_json(const std::string& text);
std::string write_system_json(const HomogeneousSystem& sys);
HomogeneousSystem load_system_file(const std::string& path);
void save_system_file(const HomogeneousSystem& sys, const std::string& path);

// Bundled example systems; "paper-sec7" is the 6-node bipartite network used
// throughout the tests.
HomogeneousSystem load_fixture(const std::string& name);

}  // namespace netsyn
