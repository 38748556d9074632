#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "copreg/copula.hpp"
#include "copreg/dataset.hpp"
#include "copreg/dgp.hpp"
#include "copreg/marginals.hpp"
#include "copreg/quadrature.hpp"

namespace copreg {

struct PseudoMleOptions {
  int max_iter = 500;
  double grad_tol = 1e-5;
  // Student-t degrees of freedom are picked from this grid by likelihood.
  std::vector<double> df_grid{3.0, 5.0, 8.0, 15.0};
};

struct PseudoMleResult {
  CopulaSpec copula = CopulaSpec::independent(Family::Gaussian, 2);
  int iterations = 0;
  // Norm of the projected gradient of the mean log-likelihood at the end.
  double gradient_norm = 0.0;
  double mean_loglik = 0.0;
};

// Mean log copula density over the rows of `u` (n x dim).
double pseudo_loglik(const PreparedCopula& copula, const Eigen::MatrixXd& u);
Eigen::VectorXd pseudo_loglik_gradient(const PreparedCopula& copula,
                                       const Eigen::MatrixXd& u);

// Starting values from Kendall's tau: tau inversion for Clayton and FGM
// (pairwise taus averaged), normal-scores correlation for Gaussian, and
// sin(pi tau / 2) for Student-t. Always feasible.
CopulaSpec initial_copula(const Eigen::MatrixXd& u, Family family, double df = 5.0);

// Maximizes the mean log copula density over pseudo-observations. Ascent
// directions come from a BFGS inverse-Hessian estimate; each step starts at
// length 1 and is halved until the projected iterate improves the objective.
// Throws ConvergenceError after max_iter.
PseudoMleResult fit_pseudo_mle(const Eigen::MatrixXd& u, Family family,
                               const PseudoMleOptions& options = {});

inline constexpr int kMeanQuadratureNodes = 512;

// Copula regression model for a continuous response. Construction tabulates
// the response quantile at the quadrature nodes, so prediction costs one copula
// density per node.
class CRModel {
 public:
  CRModel(CopulaSpec copula, std::vector<MarginalModel> margins_x,
          MarginalModel margin_y, int quadrature_nodes = kMeanQuadratureNodes);

  const CopulaSpec& copula() const { return copula_.spec(); }
  const std::vector<MarginalModel>& margins_x() const { return margins_x_; }
  const MarginalModel& margin_y() const { return margin_y_; }
  int quadrature_nodes() const { return static_cast<int>(rule_.size()); }

  // E(Y | X = x) = int_0^1 F_y^{-1}(v) c(v, u_x) dv / c_X(u_x).
  double predict_mean(std::span<const double> x) const;
  // Same with the covariates already on the copula scale.
  double predict_mean_pseudo(const Eigen::VectorXd& u_x) const;

 private:
  PreparedCopula copula_;
  std::vector<MarginalModel> margins_x_;
  MarginalModel margin_y_;
  QuadratureRule rule_;
  std::vector<double> node_y_;
};

// Empirical margins for every column, then pseudo-MLE of the copula.
// Requires n >= 30. `summary`, when given, receives the optimizer result.
CRModel fit_cr(const Dataset& data, Family family,
               const PseudoMleOptions& options = {},
               PseudoMleResult* summary = nullptr);

double predict_mean(const CRModel& model, std::span<const double> x);

// Pseudo-observations of `data` under the given margins, response first.
Eigen::MatrixXd pseudo_observations(const Dataset& data,
                                    const std::vector<MarginalModel>& margins_x,
                                    const MarginalModel& margin_y);

// Closed-form regression function of the Ia, Ib and Ic designs (IIa shares
// Ic's). Throws DomainError for other designs.
double oracle_m(DgpId dgp, std::span<const double> x);

struct ImseReport {
  double imse = 0.0;
  double ibias = 0.0;
  double ivar = 0.0;
};

// predictions[l][i]: replication l at evaluation point i. IVAR uses the 1/N
// population variance so that IMSE = IBIAS + IVAR holds exactly.
ImseReport imse_decompose(const std::vector<std::vector<double>>& predictions,
                          std::span<const double> truth);

}  // namespace copreg
