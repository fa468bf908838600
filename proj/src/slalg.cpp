#include "netsyn/slalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace netsyn {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

EigenStructure sym_eig(const Matrix& s, double dedup_rel) {
  if (s.rows() != s.cols()) throw ModelError("sym_eig: matrix is not square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ModelError("sym_eig: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  if (es.info() != Eigen::Success)
    throw ModelError("sym_eig: eigensolver did not converge");

  EigenStructure out;
  out.eigenvalues = es.eigenvalues();
  out.basis = es.eigenvectors();

  const double specrad =
      out.eigenvalues.size() == 0 ? 0.0 : out.eigenvalues.cwiseAbs().maxCoeff();
  out.dedup_tol = dedup_rel * std::max(1.0, specrad);
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    const double v = out.eigenvalues[i];
    if (!out.distinct.empty() && v - out.distinct.back() <= out.dedup_tol) {
      ++out.multiplicity.back();
    } else {
      out.distinct.push_back(v);
      out.multiplicity.push_back(1);
    }
  }
  return out;
}

double congruence_residual(const Matrix& s, const EigenStructure& es) {
  Matrix d = es.basis.transpose() * s * es.basis;
  d.diagonal() -= es.eigenvalues;
  return d.cwiseAbs().maxCoeff();
}

Matrix star(const Matrix& z, const Matrix& m) {
  if (z.rows() != m.rows() || m.rows() != m.cols())
    throw ModelError("star: incompatible dimensions");
  return z.transpose() * m * z;
}

}  // namespace netsyn
