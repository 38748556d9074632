#include "copreg/baselines.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "copreg/error.hpp"

namespace copreg {
namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols() + 1);
  out.col(0).setOnes();
  out.rightCols(x.cols()) = x;
  return out;
}

double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

void check_width(Eigen::Index cols, Eigen::Index coef) {
  if (cols + 1 != coef) {
    throw ShapeError("expected " + std::to_string(coef - 1) + " covariates, got " +
                     std::to_string(cols));
  }
}

}  // namespace

double OlsModel::predict(std::span<const double> x) const {
  check_width(static_cast<Eigen::Index>(x.size()), coef.size());
  double acc = coef[0];
  for (std::size_t j = 0; j < x.size(); ++j) acc += coef[static_cast<Eigen::Index>(j) + 1] * x[j];
  return acc;
}

Eigen::VectorXd OlsModel::predict(const Eigen::MatrixXd& x) const {
  check_width(x.cols(), coef.size());
  return (x * coef.tail(x.cols())).array() + coef[0];
}

OlsModel fit_ols(const Dataset& data) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.d() + 1;
  if (n <= p) {
    throw InsufficientDataError("OLS needs more than " + std::to_string(p) +
                                " observations, got " + std::to_string(n));
  }
  const Eigen::MatrixXd design = with_intercept(data.x);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) throw SingularDesignError("OLS design matrix is rank deficient");

  Eigen::MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += 1e-10;
  return {gram.ldlt().solve(design.transpose() * data.y)};
}

double LogitModel::predict_prob(std::span<const double> x) const {
  check_width(static_cast<Eigen::Index>(x.size()), coef.size());
  double eta = coef[0];
  for (std::size_t j = 0; j < x.size(); ++j) eta += coef[static_cast<Eigen::Index>(j) + 1] * x[j];
  return sigmoid(eta);
}

Eigen::VectorXd LogitModel::predict_prob(const Eigen::MatrixXd& x) const {
  check_width(x.cols(), coef.size());
  const Eigen::VectorXd eta = (x * coef.tail(x.cols())).array() + coef[0];
  return eta.unaryExpr([](double t) { return sigmoid(t); });
}

LogitModel fit_logit(const Dataset& data) {
  bool has0 = false, has1 = false;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (data.y[i] == 0.0) {
      has0 = true;
    } else if (data.y[i] == 1.0) {
      has1 = true;
    } else {
      throw DomainError("logistic regression needs 0/1 responses");
    }
  }
  if (!has0 || !has1) throw DegenerateDataError("response y has a single class");

  const Eigen::MatrixXd design = with_intercept(data.x);
  const Eigen::Index p = design.cols();
  LogitModel model;
  model.coef = Eigen::VectorXd::Zero(p);
  for (int iter = 1; iter <= kLogitMaxIter; ++iter) {
    model.iterations = iter;
    const Eigen::VectorXd eta = design * model.coef;
    const Eigen::VectorXd prob = eta.unaryExpr([](double t) { return sigmoid(t); });
    const Eigen::VectorXd weight = prob.array() * (1.0 - prob.array());
    Eigen::MatrixXd hessian = design.transpose() * weight.asDiagonal() * design;
    hessian.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hessian.ldlt().solve(design.transpose() * (data.y - prob));
    if (!step.allFinite()) break;
    model.coef += step;
    if (step.cwiseAbs().maxCoeff() < kLogitTol) {
      model.converged = true;
      break;
    }
  }
  model.separated = !model.converged;
  return model;
}

}  // namespace copreg
