#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dfrc {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Thrown when an argument violates a documented precondition.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Angle outside [-90, 90] degrees.
class InvalidAngleError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

// Factorization of a matrix that is not (numerically) positive definite.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  NotPositiveDefiniteError(const std::string& what, double min_eigenvalue)
      : std::runtime_error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

// A quantity that must be real/non-negative/PSD by construction is not.
class NumericalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// MMSE weight matrix inverse failed (E_k^mmse singular beyond tolerance).
class IllConditionedWeightError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment configuration file problems (maps to CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

inline double rel_frobenius_error(const CMat& a, const CMat& ref) {
  const double denom = ref.norm();
  return denom > 0 ? (a - ref).norm() / denom : (a - ref).norm();
}

}  // namespace dfrc
