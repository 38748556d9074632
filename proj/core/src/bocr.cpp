#include "copreg/bocr.hpp"

#include <algorithm>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "copreg/quadrature.hpp"
#include "copreg/special.hpp"

namespace copreg {
namespace {

constexpr double kLatentClamp = 1e-12;

double clamp_unit(double v) {
  return std::clamp(v, kLatentClamp, 1.0 - kLatentClamp);
}

double bernoulli(int y, double z) { return y == 1 ? z : 1.0 - z; }

double latent_score(const CopulaSpec& spec, double v) {
  switch (spec.family()) {
    case Family::Gaussian: return normal_quantile(v);
    case Family::StudentT: return student_t_quantile(v, spec.df());
    default: return v;
  }
}

// Labels must be 0/1; fitting also needs both classes.
void check_binary(std::span<const double> y, bool need_both = true) {
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) {
      has0 = true;
    } else if (y[i] == 1.0) {
      has1 = true;
    } else {
      throw DomainError("response y must be 0 or 1 (row " + std::to_string(i + 1) + ")");
    }
  }
  if (need_both && (!has0 || !has1)) {
    throw DegenerateDataError("response y has a single class");
  }
}

Eigen::MatrixXd pseudo_matrix(const BocrModel& model, const Dataset& data) {
  if (data.d() != model.covariates()) {
    throw ShapeError("expected " + std::to_string(model.covariates()) +
                     " covariates, got " + std::to_string(data.d()));
  }
  Eigen::MatrixXd u(data.n(), data.d());
  for (Eigen::Index r = 0; r < data.n(); ++r) {
    for (Eigen::Index j = 0; j < data.d(); ++j) {
      u(r, j) = model.margins_x[j].pseudo_observation(data.x(r, j));
    }
  }
  return u;
}

struct Evaluation {
  double loglik = 0.0;
  double loglik_var = 0.0;
  ScoreEstimate score;
};

// Shared kernel of mc_loglik and score_gradients.
Evaluation evaluate(const BocrModel& model, const Eigen::MatrixXd& u_x,
                    std::span<const double> y, const Eigen::MatrixXd& latents,
                    Pooling pooling, bool with_gradient) {
  const Eigen::Index n = u_x.rows();
  const Eigen::Index d = u_x.cols();
  const int K = static_cast<int>(latents.cols());
  if (d != model.covariates() || model.copula.dim() != d + 1) {
    throw ShapeError("covariate count does not match the model");
  }
  if (latents.rows() != n || static_cast<Eigen::Index>(y.size()) != n) {
    throw ShapeError("latent draws, responses and covariates disagree in length");
  }
  if (n == 0 || K < 1) throw ShapeError("no observations or no draws");

  const PreparedCopula cop(model.copula);
  const BetaScorer scorer(model.latent);
  const int p = model.copula.num_params();
  const int m = p + 2;

  Evaluation out;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd total_var = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd pooled_a = Eigen::VectorXd::Zero(m);
  double pooled_w = 0.0;
  Eigen::VectorXd w(K);
  Eigen::MatrixXd a(with_gradient ? m : 0, K);
  std::vector<double> pooled_ws;
  Eigen::MatrixXd pooled_as;
  if (with_gradient && pooling == Pooling::Pooled) {
    pooled_ws.reserve(static_cast<std::size_t>(n) * K);
    pooled_as.resize(m, n * K);
  }

  Eigen::VectorXd u(d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int yi = static_cast<int>(y[i]);
    u[0] = 0.5;
    u.tail(d) = u_x.row(i).transpose();
    Eigen::VectorXd s = cop.scores(u);
    double sum_w = 0.0;
    for (int k = 0; k < K; ++k) {
      const double z = latents(i, k);
      const double v = clamp_unit(scorer.cdf(z));
      u[0] = v;
      s[0] = model.copula.elliptical() ? latent_score(model.copula, v) : v;
      const double wk = std::exp(cop.log_density(u, s)) * bernoulli(yi, z);
      w[k] = wk;
      sum_w += wk;
      if (with_gradient) {
        const BetaScore bs = scorer.score(z);
        const double dlogc_dv = cop.log_density_partial(u, s, 0);
        a.col(k).head(p) = wk * cop.log_density_grad(u, s);
        a(p, k) = wk * (dlogc_dv * bs.dF[0] + bs.dlogf[0]);
        a(p + 1, k) = wk * (dlogc_dv * bs.dF[1] + bs.dlogf[1]);
      }
    }
    if (!(sum_w > 0.0) || !std::isfinite(sum_w)) {
      throw UnderflowError("all latent weights vanished for observation " +
                               std::to_string(i + 1),
                           static_cast<std::size_t>(i));
    }
    const double mean_w = sum_w / K;
    out.loglik += std::log(mean_w);
    if (K > 1) {
      const double var_w = (w.array() - mean_w).square().sum() / (K - 1);
      out.loglik_var += var_w / (K * mean_w * mean_w);
    }
    if (!with_gradient) continue;

    const Eigen::VectorXd sum_a = a.rowwise().sum();
    pooled_a += sum_a;
    pooled_w += sum_w;
    if (pooling == Pooling::PerObservation) {
      const Eigen::VectorXd r = sum_a / sum_w;
      total += r;
      if (K > 1) {
        // Var of a ratio estimator: Var(a - r w) / (K mean(w)^2).
        const Eigen::MatrixXd resid = a - r * w.transpose();
        total_var += resid.rowwise().squaredNorm() / ((K - 1.0) * K * mean_w * mean_w);
      }
    } else {
      for (int k = 0; k < K; ++k) {
        pooled_ws.push_back(w[k]);
        pooled_as.col(static_cast<Eigen::Index>(pooled_ws.size()) - 1) = a.col(k);
      }
    }
  }

  if (!with_gradient) return out;
  if (pooling == Pooling::Pooled) {
    total = pooled_a / pooled_w;
    const double count = static_cast<double>(pooled_ws.size());
    if (count > 1) {
      const double mean_w = pooled_w / count;
      const Eigen::Map<const Eigen::VectorXd> wv(pooled_ws.data(), pooled_as.cols());
      const Eigen::MatrixXd resid = pooled_as - total * wv.transpose();
      total_var = resid.rowwise().squaredNorm() / ((count - 1.0) * count * mean_w * mean_w);
    }
  }
  out.score.g_theta = total.head(p);
  out.score.g_phi = total.tail(2);
  out.score.se_theta = total_var.head(p).cwiseSqrt();
  out.score.se_phi = total_var.tail(2).cwiseSqrt();
  out.score.loglik = out.loglik;
  return out;
}

Eigen::VectorXd snapshot(const BocrModel& model) {
  const Eigen::VectorXd theta = model.copula.params();
  Eigen::VectorXd out(theta.size() + 2);
  out << theta, model.latent.log_alpha, model.latent.log_beta;
  return out;
}

// A fixed step can jump a correlation matrix past the positive-definite
// boundary, and projecting back then leaves it nearly singular. Halve the
// step until the smallest eigenvalue keeps at least half its current value.
Eigen::VectorXd interior_step(const CopulaSpec& copula, Eigen::VectorXd d) {
  if (copula.family() != Family::Gaussian && copula.family() != Family::StudentT) return d;
  const auto min_eig = [](const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
  };
  const double floor = 0.5 * min_eig(copula.corr());
  for (int k = 0; k < 60; ++k) {
    if (min_eig(copula.with_params(copula.params() + d).corr()) >= floor) break;
    d *= 0.5;
  }
  return d;
}

}  // namespace

Eigen::VectorXd BocrModel::pseudo_covariates(std::span<const double> x) const {
  if (x.size() != margins_x.size()) {
    throw ShapeError("expected " + std::to_string(margins_x.size()) +
                     " covariates, got " + std::to_string(x.size()));
  }
  Eigen::VectorXd u(static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j])) throw DomainError("covariate is not finite");
    u[static_cast<Eigen::Index>(j)] = margins_x[j].pseudo_observation(x[j]);
  }
  return u;
}

BocrModel initial_bocr_model(Family family, std::vector<MarginalModel> margins_x,
                             double df) {
  const int dim = static_cast<int>(margins_x.size()) + 1;
  if (family == Family::FGM && dim != 2) {
    throw ParameterError("FGM copula needs exactly one covariate");
  }
  return {CopulaSpec::independent(family, dim, df), LatentParams{},
          std::move(margins_x)};
}

void FitConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ParameterError("step must be positive");
  if (mc_samples < 1) throw ParameterError("mc_samples must be at least 1");
  if (max_iter < 1) throw ParameterError("max_iter must be at least 1");
  if (!(grad_tol >= 0.0)) throw ParameterError("grad_tol must be nonnegative");
  if (!(df > 0.0)) throw ParameterError("df must be positive");
}

double joint_weight(const BocrModel& model, const Eigen::VectorXd& u_x, int y,
                    double z) {
  if (!(z > 0.0 && z < 1.0)) throw DomainError("latent z must lie in (0,1)");
  if (y != 0 && y != 1) throw DomainError("y must be 0 or 1");
  if (u_x.size() + 1 != model.copula.dim()) {
    throw ShapeError("covariate count does not match the model");
  }
  Eigen::VectorXd u(u_x.size() + 1);
  u[0] = clamp_unit(model.latent.marginal().cdf(z));
  u.tail(u_x.size()) = u_x;
  return density(model.copula, u) * bernoulli(y, z);
}

Eigen::MatrixXd draw_latents(const LatentParams& latent, Eigen::Index n, int K,
                             RandomStream& rng) {
  const double alpha = latent.alpha();
  const double beta = latent.beta();
  Eigen::MatrixXd z(n, K);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < K; ++k) z(i, k) = clamp_unit(beta_variate(alpha, beta, rng));
  }
  return z;
}

LogLikEstimate mc_loglik(const BocrModel& model, const Dataset& data, int K,
                         RandomStream& rng) {
  check_binary(data.y_span(), false);
  const Eigen::MatrixXd u = pseudo_matrix(model, data);
  const Eigen::MatrixXd z = draw_latents(model.latent, data.n(), K, rng);
  const Evaluation e = evaluate(model, u, data.y_span(), z, Pooling::PerObservation, false);
  return {e.loglik, std::sqrt(e.loglik_var)};
}

ScoreEstimate score_gradients(const BocrModel& model, const Dataset& data, int K,
                              RandomStream& rng, Pooling pooling) {
  const Eigen::MatrixXd u = pseudo_matrix(model, data);
  const Eigen::MatrixXd z = draw_latents(model.latent, data.n(), K, rng);
  return score_gradients(model, u, data.y_span(), z, pooling);
}

ScoreEstimate score_gradients(const BocrModel& model, const Eigen::MatrixXd& u_x,
                              std::span<const double> y,
                              const Eigen::MatrixXd& latents, Pooling pooling) {
  for (double v : y) {
    if (v != 0.0 && v != 1.0) throw DomainError("response y must be 0 or 1");
  }
  return evaluate(model, u_x, y, latents, pooling, true).score;
}

BocrFit fit_bocr(const Dataset& data, Family family, const FitConfig& config) {
  config.validate();
  check_binary(data.y_span());
  if (data.d() < 1) throw ShapeError("BOCR needs at least one covariate");

  std::vector<MarginalModel> margins;
  margins.reserve(static_cast<std::size_t>(data.d()));
  for (Eigen::Index j = 0; j < data.d(); ++j) {
    const Eigen::VectorXd col = data.x.col(j);
    margins.push_back(fit_empirical({col.data(), static_cast<std::size_t>(col.size())}));
  }
  BocrFit out{initial_bocr_model(family, std::move(margins), config.df), {}};
  BocrModel& model = out.model;
  const Eigen::MatrixXd u = pseudo_matrix(model, data);
  const double scale = config.pooling == Pooling::PerObservation
                           ? 1.0 / static_cast<double>(data.n())
                           : 1.0;
  RandomStream rng = make_stream(config.seed, kFitStream);

  for (int iter = 0; iter < config.max_iter; ++iter) {
    const Eigen::MatrixXd z = draw_latents(model.latent, data.n(), config.mc_samples, rng);
    Evaluation e;
    try {
      e = evaluate(model, u, data.y_span(), z, config.pooling, true);
    } catch (const UnderflowError& err) {
      throw DivergenceError(std::string("latent weights underflowed: ") + err.what(),
                            std::move(out.trace));
    }
    const Eigen::VectorXd g_theta = scale * e.score.g_theta;
    const Eigen::Vector2d g_phi = scale * e.score.g_phi;
    TraceRecord rec;
    rec.iteration = iter;
    rec.loglik = e.loglik;
    rec.grad_theta = g_theta.size() ? g_theta.cwiseAbs().maxCoeff() : 0.0;
    rec.grad_phi = g_phi.cwiseAbs().maxCoeff();
    rec.params = snapshot(model);
    const bool finite = std::isfinite(rec.grad_theta) && std::isfinite(rec.grad_phi) &&
                        std::isfinite(rec.loglik);
    out.trace.push_back(std::move(rec));
    if (!finite) {
      throw DivergenceError("non-finite gradient at iteration " + std::to_string(iter),
                            std::move(out.trace));
    }
    if (out.trace.back().grad_theta < config.grad_tol &&
        out.trace.back().grad_phi < config.grad_tol) {
      break;
    }

    const double eps = config.decay ? config.step / std::sqrt(iter + 1.0) : config.step;
    const Eigen::VectorXd d_theta = interior_step(model.copula, eps * g_theta);
    const Eigen::Vector2d d_phi = eps * g_phi;
    model.copula = project_params(model.copula.with_params(model.copula.params() + d_theta));
    model.latent = LatentParams{model.latent.log_alpha + d_phi[0],
                                model.latent.log_beta + d_phi[1]}
                       .clamped();
  }
  return out;
}

double predict_prob(const BocrModel& model, std::span<const double> x) {
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) row(0, static_cast<Eigen::Index>(j)) = x[j];
  return predict_prob(model, row)[0];
}

Eigen::VectorXd predict_prob(const BocrModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.covariates()) {
    throw ShapeError("expected " + std::to_string(model.covariates()) +
                     " covariates, got " + std::to_string(x.cols()));
  }
  static const QuadratureRule rule = clustered_unit_rule(kPredictNodes);
  const MarginalModel latent = model.latent.marginal();
  const PreparedCopula cop(model.copula);
  const Eigen::Index d = x.cols();
  std::vector<double> node_z(rule.size());
  std::vector<double> node_s(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    node_z[k] = latent.quantile(rule.nodes[k]);
    node_s[k] = model.copula.elliptical() ? latent_score(model.copula, rule.nodes[k])
                                          : rule.nodes[k];
  }

  Eigen::VectorXd out(x.rows());
  Eigen::VectorXd u(d + 1);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Eigen::VectorXd row = x.row(r).transpose();
    u[0] = 0.5;
    u.tail(d) = model.pseudo_covariates({row.data(), static_cast<std::size_t>(d)});
    Eigen::VectorXd s = cop.scores(u);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      u[0] = rule.nodes[k];
      s[0] = node_s[k];
      const double c = rule.weights[k] * std::exp(cop.log_density(u, s));
      num += c * node_z[k];
      den += c;
    }
    const double m = num / den;
    if (!std::isfinite(m)) throw NumericError("probability quadrature is not finite");
    out[r] = std::clamp(m, kPredictFloor, 1.0 - kPredictFloor);
  }
  return out;
}

}  // namespace copreg
