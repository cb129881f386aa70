#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kld {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an argument lies outside the domain of an operation
/// (point outside the design space, dimension mismatch, empty design, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The model pair cannot be handled by the requested operation.
class UnsupportedModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The efficiency bound is undefined for a non-positive criterion value.
class UndefinedEfficiencyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace kld
