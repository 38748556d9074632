#include "copreg/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "copreg/error.hpp"
#include "copreg/special.hpp"
#include "copreg/stats.hpp"

namespace copreg {
namespace {

constexpr double kPseudoFloor = 1e-12;

double empirical_cdf(const std::vector<double>& s, double h, double x) {
  double acc = 0.0;
  for (double xi : s) acc += normal_cdf((x - xi) / h);
  return acc / s.size();
}

double empirical_pdf(const std::vector<double>& s, double h, double x) {
  double acc = 0.0;
  for (double xi : s) acc += normal_pdf((x - xi) / h);
  return acc / (s.size() * h);
}

double empirical_quantile(const std::vector<double>& s, double h, double p) {
  // F is a smooth mixture, strictly increasing, so Newton inside a shrinking
  // bisection bracket converges quickly and safely.
  double lo = s.front() - 40.0 * h;
  double hi = s.back() + 40.0 * h;
  while (empirical_cdf(s, h, lo) > p) lo -= 40.0 * h;
  while (empirical_cdf(s, h, hi) < p) hi += 40.0 * h;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = empirical_cdf(s, h, x) - p;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    const double d = empirical_pdf(s, h, x);
    double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) ||
        hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

MarginalModel MarginalModel::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw ParameterError("normal marginal needs sd > 0");
  return MarginalModel(MarginalKind::Normal, mean, sd);
}

MarginalModel MarginalModel::uniform01() {
  return MarginalModel(MarginalKind::Uniform01, 0.0, 0.0);
}

MarginalModel MarginalModel::beta(double alpha, double beta) {
  if (!(alpha > 0.0 && beta > 0.0)) {
    throw ParameterError("beta marginal needs alpha, beta > 0");
  }
  return MarginalModel(MarginalKind::Beta, alpha, beta);
}

MarginalModel MarginalModel::gumbel() {
  return MarginalModel(MarginalKind::Gumbel, 0.0, 0.0);
}

MarginalModel MarginalModel::empirical(std::vector<double> sample,
                                       double bandwidth) {
  if (sample.empty()) throw InsufficientDataError("empirical marginal needs data");
  if (!(bandwidth > 0.0)) throw ParameterError("bandwidth must be positive");
  std::sort(sample.begin(), sample.end());
  MarginalModel m(MarginalKind::Empirical, bandwidth, 0.0);
  m.sample_ = std::move(sample);
  return m;
}

double MarginalModel::cdf(double x) const {
  switch (kind_) {
    case MarginalKind::Normal: return normal_cdf((x - a_) / b_);
    case MarginalKind::Uniform01: return std::clamp(x, 0.0, 1.0);
    case MarginalKind::Beta: return beta_cdf(x, a_, b_);
    case MarginalKind::Gumbel: return -std::expm1(-std::exp(x));
    case MarginalKind::Empirical: return empirical_cdf(sample_, a_, x);
  }
  return 0.0;
}

double MarginalModel::pdf(double x) const {
  switch (kind_) {
    case MarginalKind::Normal: return normal_pdf((x - a_) / b_) / b_;
    case MarginalKind::Uniform01: return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
    case MarginalKind::Beta: return beta_pdf(x, a_, b_);
    case MarginalKind::Gumbel: {
      if (x > 700.0) return 0.0;
      return std::exp(x - std::exp(x));
    }
    case MarginalKind::Empirical: return empirical_pdf(sample_, a_, x);
  }
  return 0.0;
}

double MarginalModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("quantile: probability must lie strictly inside (0,1)");
  }
  switch (kind_) {
    case MarginalKind::Normal: return a_ + b_ * normal_quantile(p);
    case MarginalKind::Uniform01: return p;
    case MarginalKind::Beta: return beta_quantile(p, a_, b_);
    case MarginalKind::Gumbel: return std::log(-std::log1p(-p));
    case MarginalKind::Empirical: return empirical_quantile(sample_, a_, p);
  }
  return 0.0;
}

double MarginalModel::pseudo_observation(double x) const {
  double u = cdf(x);
  if (kind_ == MarginalKind::Empirical) {
    const double n = static_cast<double>(sample_.size());
    u *= n / (n + 1.0);
  }
  return std::clamp(u, kPseudoFloor, 1.0 - kPseudoFloor);
}

MarginalModel fit_empirical(std::span<const double> sample) {
  if (sample.size() < 10) {
    throw InsufficientDataError("empirical marginal needs at least 10 points, got " +
                                std::to_string(sample.size()));
  }
  const double sd = sample_sd(sample);
  if (!(sd > 0.0)) {
    throw DegenerateDataError("sample has zero spread; cannot choose a bandwidth");
  }
  const double n = static_cast<double>(sample.size());
  const double h = 1.06 * sd * std::pow(n, -1.0 / 3.0);
  return MarginalModel::empirical(std::vector<double>(sample.begin(), sample.end()), h);
}

// ---------------------------------------------------------------- latent

double LatentParams::alpha() const { return std::exp(log_alpha); }
double LatentParams::beta() const { return std::exp(log_beta); }

LatentParams LatentParams::clamped() const {
  auto box = [](double v) {
    if (std::isnan(v)) return 0.0;
    return std::clamp(v, -kBox, kBox);
  };
  return {box(log_alpha), box(log_beta)};
}

BetaScorer::BetaScorer(const LatentParams& phi)
    : alpha_(phi.alpha()),
      beta_(phi.beta()),
      psi_a_(digamma(alpha_)),
      psi_b_(digamma(beta_)),
      psi_ab_(digamma(alpha_ + beta_)),
      alpha_up_(std::exp(phi.log_alpha + kBetaScoreStep)),
      alpha_dn_(std::exp(phi.log_alpha - kBetaScoreStep)),
      beta_up_(std::exp(phi.log_beta + kBetaScoreStep)),
      beta_dn_(std::exp(phi.log_beta - kBetaScoreStep)) {}

double BetaScorer::cdf(double z) const { return beta_cdf(z, alpha_, beta_); }
double BetaScorer::pdf(double z) const { return beta_pdf(z, alpha_, beta_); }

BetaScore BetaScorer::score(double z) const {
  if (!(z > 0.0 && z < 1.0)) {
    throw DomainError("beta_score: z must lie strictly inside (0,1)");
  }
  BetaScore out;
  out.dlogf[0] = alpha_ * (std::log(z) + psi_ab_ - psi_a_);
  out.dlogf[1] = beta_ * (std::log1p(-z) + psi_ab_ - psi_b_);
  const double h2 = 2.0 * kBetaScoreStep;
  out.dF[0] = (beta_cdf(z, alpha_up_, beta_) - beta_cdf(z, alpha_dn_, beta_)) / h2;
  out.dF[1] = (beta_cdf(z, alpha_, beta_up_) - beta_cdf(z, alpha_, beta_dn_)) / h2;
  return out;
}

BetaScore beta_score(const LatentParams& phi, double z) {
  return BetaScorer(phi).score(z);
}

}  // namespace copreg
