#pragma once

#include <vector>

#include "netsyn/types.hpp"

namespace netsyn {

// Spectral data of a symmetric matrix, with the distinct eigenvalues
// deduplicated to a relative tolerance.
struct EigenStructure {
  Vector eigenvalues;          // ascending, one per dimension
  Matrix basis;                // orthogonal, columns are eigenvectors
  std::vector<double> distinct;      // ascending, deduplicated
  std::vector<int> multiplicity;     // aligned with distinct
  double dedup_tol = 0.0;            // absolute tolerance actually used
};

Matrix kron(const Matrix& a, const Matrix& b);

// Symmetric eigendecomposition. Throws ModelError when the input is not
// symmetric to 1e-12 relative. dedup_rel scales with max(1, spectral radius).
EigenStructure sym_eig(const Matrix& s, double dedup_rel = 1e-9);

// Residual of the orthogonal diagonalization, max |Z^T S Z - diag(lambda)|.
double congruence_residual(const Matrix& s, const EigenStructure& es);

// Star product Z^T M Z without forming intermediates twice.
Matrix star(const Matrix& z, const Matrix& m);

}  // namespace netsyn
