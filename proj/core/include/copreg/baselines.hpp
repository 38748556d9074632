#pragma once

#include <span>

#include <Eigen/Core>

#include "copreg/dataset.hpp"

namespace copreg {

// Least squares with intercept. coef[0] is the intercept.
struct OlsModel {
  Eigen::VectorXd coef;

  double predict(std::span<const double> x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

// Normal equations with a 1e-10 ridge. Throws InsufficientDataError when
// n <= d + 1 and SingularDesignError when the design is rank deficient.
OlsModel fit_ols(const Dataset& data);

struct LogitModel {
  Eigen::VectorXd coef;  // intercept first
  int iterations = 0;
  bool converged = false;
  // Newton-Raphson did not settle within the iteration cap, which for
  // logistic regression means the classes are (quasi-)separated.
  bool separated = false;

  double predict_prob(std::span<const double> x) const;
  Eigen::VectorXd predict_prob(const Eigen::MatrixXd& x) const;
};

inline constexpr int kLogitMaxIter = 100;
inline constexpr double kLogitTol = 1e-8;

// Maximum-likelihood logistic regression by IRLS. Throws DegenerateDataError
// when y has a single class.
LogitModel fit_logit(const Dataset& data);

}  // namespace copreg
