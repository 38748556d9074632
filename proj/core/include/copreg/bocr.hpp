#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "copreg/copula.hpp"
#include "copreg/dataset.hpp"
#include "copreg/error.hpp"
#include "copreg/marginals.hpp"
#include "copreg/rng.hpp"

namespace copreg {

// Binary-outcome copula regression: a latent success probability Z with a
// Beta(alpha, beta) marginal is tied to the covariates by a copula, and
// Y | Z ~ Bernoulli(Z). Coordinate 0 of the copula is Z.
struct BocrModel {
  CopulaSpec copula;
  LatentParams latent;
  std::vector<MarginalModel> margins_x;

  int covariates() const { return static_cast<int>(margins_x.size()); }
  // Copula scale of a covariate row.
  Eigen::VectorXd pseudo_covariates(std::span<const double> x) const;
};

// Independence-type starting model (Sigma = I, delta = 0.5, theta = 0) with a
// uniform latent marginal.
BocrModel initial_bocr_model(Family family, std::vector<MarginalModel> margins_x,
                             double df = 5.0);

enum class Pooling {
  // Sum over observations of per-observation MC ratios: the score of the
  // MC log-likelihood.
  PerObservation,
  // One ratio whose numerator and denominator are summed over all draws of
  // all observations.
  Pooled,
};

struct FitConfig {
  double step = 0.05;
  int mc_samples = 50;
  int max_iter = 300;
  double grad_tol = 1e-3;
  std::uint64_t seed = 0;
  Pooling pooling = Pooling::PerObservation;
  // Step at iteration t is step / sqrt(t + 1) when set.
  bool decay = false;
  // Degrees of freedom for the Student-t family.
  double df = 5.0;

  // Throws ParameterError.
  void validate() const;
};

struct TraceRecord {
  int iteration = 0;
  double loglik = 0.0;
  // Max-norms of the gradients driving the update.
  double grad_theta = 0.0;
  double grad_phi = 0.0;
  // Copula free parameters followed by (log alpha, log beta), before the
  // update of this iteration.
  Eigen::VectorXd params;
};

using FitTrace = std::vector<TraceRecord>;

class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, FitTrace trace)
      : NumericError(what), trace_(std::move(trace)) {}
  const FitTrace& trace() const { return trace_; }

 private:
  FitTrace trace_;
};

// c(u_x, F(z)) * z^y (1 - z)^(1 - y). Throws DomainError for z or u_x on the
// boundary.
double joint_weight(const BocrModel& model, const Eigen::VectorXd& u_x, int y,
                    double z);

// n x K latent draws from the model's Beta marginal, filled observation by
// observation and clamped to [1e-12, 1 - 1e-12].
Eigen::MatrixXd draw_latents(const LatentParams& latent, Eigen::Index n, int K,
                             RandomStream& rng);

struct LogLikEstimate {
  double value = 0.0;
  // Delta-method standard error of the sum of per-observation log means.
  double std_error = 0.0;
};

// sum_n log[(1/K) sum_k joint_weight(u_n, y_n, z_nk)], z_nk from the latent
// marginal. Throws UnderflowError naming the observation when all K weights
// vanish.
LogLikEstimate mc_loglik(const BocrModel& model, const Dataset& data, int K,
                         RandomStream& rng);

struct ScoreEstimate {
  Eigen::VectorXd g_theta;
  Eigen::Vector2d g_phi = Eigen::Vector2d::Zero();
  Eigen::VectorXd se_theta;
  Eigen::Vector2d se_phi = Eigen::Vector2d::Zero();
  // MC log-likelihood from the same draws.
  double loglik = 0.0;
};

// Monte-Carlo score of the log-likelihood in the copula parameters and in
// (log alpha, log beta). Standard errors use the delta method for ratio
// estimators.
ScoreEstimate score_gradients(const BocrModel& model, const Dataset& data, int K,
                              RandomStream& rng,
                              Pooling pooling = Pooling::PerObservation);

// Same, on caller-supplied draws (n x K) and covariates already on the copula
// scale (n x d).
ScoreEstimate score_gradients(const BocrModel& model, const Eigen::MatrixXd& u_x,
                              std::span<const double> y,
                              const Eigen::MatrixXd& latents, Pooling pooling);

struct BocrFit {
  BocrModel model;
  FitTrace trace;
};

// Sampling-gradient ascent. Each iteration draws fresh latents, checks the
// max-norm of both gradients against grad_tol, then steps theta and phi and
// projects theta back onto the feasible set. For PerObservation pooling the
// step uses the gradient divided by n.
//
// Throws DegenerateDataError for single-class y, DivergenceError on a
// non-finite gradient.
BocrFit fit_bocr(const Dataset& data, Family family, const FitConfig& config);

// fit_bocr draws its latents from this stream of FitConfig::seed.
inline constexpr std::uint64_t kFitStream = 2;

inline constexpr int kPredictNodes = 64;
inline constexpr double kPredictFloor = 2.220446049250313e-16;

// E(Z | X = x) by a 64-node rule in v = F(z):
//   int F^{-1}(v) c(v, u_x) dv / int c(v, u_x) dv,
// clamped into [2^-52, 1 - 2^-52].
double predict_prob(const BocrModel& model, std::span<const double> x);

// predict_prob for every row of x, sharing the node quantiles.
Eigen::VectorXd predict_prob(const BocrModel& model, const Eigen::MatrixXd& x);

}  // namespace copreg
