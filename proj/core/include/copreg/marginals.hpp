#pragma once

#include <array>
#include <span>
#include <vector>

namespace copreg {

enum class MarginalKind { Normal, Uniform01, Beta, Gumbel, Empirical };

// One-dimensional distribution used for covariates, responses and the latent
// success probability.
//
// Gumbel is the location-free form F(x) = 1 - exp(-exp(x)) (the minimum
// Gumbel), as used by the FGM regression design.
//
// Empirical is the kernel-smoothed CDF  F(x) = (1/n) sum Phi((x - X_i) / h)
// with a Gaussian kernel; its quantile is found by safeguarded Newton.
class MarginalModel {
 public:
  static MarginalModel normal(double mean, double sd);
  static MarginalModel uniform01();
  static MarginalModel beta(double alpha, double beta);
  static MarginalModel gumbel();
  // `sample` need not be sorted.
  static MarginalModel empirical(std::vector<double> sample, double bandwidth);

  MarginalKind kind() const { return kind_; }
  // Normal: (mean, sd). Beta: (alpha, beta). Otherwise unused.
  double first() const { return a_; }
  double second() const { return b_; }
  const std::vector<double>& sorted_sample() const { return sample_; }
  double bandwidth() const { return a_; }

  double cdf(double x) const;
  double pdf(double x) const;
  // Throws DomainError unless 0 < p < 1.
  double quantile(double p) const;

  // cdf(x) mapped strictly inside (0,1) for use as a copula argument. For the
  // empirical kind the smoothed CDF is rescaled by n/(n+1) first.
  double pseudo_observation(double x) const;

 private:
  MarginalModel(MarginalKind kind, double a, double b)
      : kind_(kind), a_(a), b_(b) {}

  MarginalKind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> sample_;
};

// Kernel-smoothed marginal with h = 1.06 * sd * n^(-1/3).
// Throws InsufficientDataError for n < 10 and DegenerateDataError when the
// sample has zero spread.
MarginalModel fit_empirical(std::span<const double> sample);

// Beta(alpha, beta) latent marginal parametrized on the log scale.
struct LatentParams {
  double log_alpha = 0.0;
  double log_beta = 0.0;

  static constexpr double kBox = 10.0;

  double alpha() const;
  double beta() const;
  // Clamped into the optimizer box |log alpha|, |log beta| <= 10.
  LatentParams clamped() const;
  MarginalModel marginal() const { return MarginalModel::beta(alpha(), beta()); }
};

struct BetaScore {
  // d log f / d(log alpha, log beta), analytic.
  std::array<double, 2> dlogf{};
  // d F / d(log alpha, log beta), central differences with step 1e-6.
  std::array<double, 2> dF{};
};

BetaScore beta_score(const LatentParams& phi, double z);

// beta_score with the parameter-only terms (digammas) computed once; the
// sampling-gradient loop evaluates thousands of z per parameter value.
class BetaScorer {
 public:
  explicit BetaScorer(const LatentParams& phi);

  double cdf(double z) const;
  double pdf(double z) const;
  BetaScore score(double z) const;

 private:
  double alpha_, beta_;
  double psi_a_, psi_b_, psi_ab_;
  double alpha_up_, alpha_dn_, beta_up_, beta_dn_;
};

inline constexpr double kBetaScoreStep = 1e-6;

}  // namespace copreg
