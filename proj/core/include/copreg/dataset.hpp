#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>

namespace copreg {

// n observations of d covariates and one response. For binary data y holds
// 0/1 and `latent` may carry the simulated success probabilities; fitting code
// never reads `latent`.
struct Dataset {
  Eigen::MatrixXd x;  // n x d
  Eigen::VectorXd y;  // n
  std::optional<Eigen::VectorXd> latent;
  bool binary = false;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }

  std::span<const double> y_span() const { return {y.data(), static_cast<std::size_t>(y.size())}; }

  // Rows `idx` in the given order.
  Dataset subset(std::span<const Eigen::Index> idx) const;
};

}  // namespace copreg
