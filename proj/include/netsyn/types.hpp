#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace netsyn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Malformed model data or violated shape preconditions.
class ModelError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Synthesis target is infeasible at the requested upper bound.
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A returned certificate failed independent verification, or gain recovery
// is numerically unreliable.
class CertificateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace netsyn
