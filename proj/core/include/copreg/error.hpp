#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace copreg {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of the operation
// (boundary pseudo-observation, probability outside (0,1), unknown tag).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Correlation matrix too close to singular to factorize reliably.
class ConditioningError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Input data cannot support the requested fit: zero spread, a single class.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SingularDesignError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class UnderflowError : public NumericError {
 public:
  UnderflowError(const std::string& what, std::size_t index)
      : NumericError(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Optimizer ran out of iterations. Carries the last iterate so callers can
// inspect or resume.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate,
                   int iterations, double gradient_norm)
      : NumericError(what),
        last_iterate_(std::move(last_iterate)),
        iterations_(iterations),
        gradient_norm_(gradient_norm) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  int iterations() const { return iterations_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  Eigen::VectorXd last_iterate_;
  int iterations_;
  double gradient_norm_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace copreg
