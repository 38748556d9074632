#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "copreg/rng.hpp"

namespace copreg {

enum class Family { Gaussian, Clayton, FGM, StudentT };

std::string_view family_name(Family family);
// Case-insensitive; accepts "Gaussian", "Clayton", "FGM", "StudentT"/"T".
Family parse_family(std::string_view name);

// Pseudo-observations closer than this to 0 or 1 are clamped by samplers and
// by the regression front-ends before reaching a density.
inline constexpr double kUnitFloor = 1e-15;

// Parametric copula. Coordinate 0 is the response (or the latent
// probability); coordinates 1..d are covariates.
//
// Free parameters, as exposed by params()/with_params():
//   Clayton   [delta]
//   FGM       [theta]
//   Gaussian  upper-triangle correlations, row-major: (0,1),(0,2),..,(1,2),..
//   StudentT  same as Gaussian; df is a fixed hyper-parameter
//
// Factories do not validate, so infeasible iterates can be represented and
// handed to project_params(). validate() enforces the domain.
class CopulaSpec {
 public:
  static CopulaSpec gaussian(Eigen::MatrixXd corr);
  static CopulaSpec student_t(Eigen::MatrixXd corr, double df);
  static CopulaSpec clayton(double delta, int dim = 2);
  static CopulaSpec fgm(double theta);
  // Starting point with no dependence (Clayton starts at delta = 0.5, the
  // family has no independence member in its interior).
  static CopulaSpec independent(Family family, int dim, double df = 5.0);

  Family family() const { return family_; }
  int dim() const { return dim_; }
  double scalar() const { return scalar_; }
  const Eigen::MatrixXd& corr() const { return corr_; }
  double df() const { return df_; }
  bool elliptical() const {
    return family_ == Family::Gaussian || family_ == Family::StudentT;
  }

  int num_params() const;
  Eigen::VectorXd params() const;
  CopulaSpec with_params(const Eigen::VectorXd& params) const;

  // Throws ParameterError (ConditioningError for near-singular matrices).
  void validate() const;

  // The copula of coordinates 1..d. nullopt when d == 1 (uniform margin).
  std::optional<CopulaSpec> covariate_block() const;

 private:
  CopulaSpec(Family family, int dim, double scalar, Eigen::MatrixXd corr,
             double df)
      : family_(family), dim_(dim), scalar_(scalar), corr_(std::move(corr)),
        df_(df) {}

  Family family_;
  int dim_;
  double scalar_;
  Eigen::MatrixXd corr_;
  double df_;
};

// A validated copula with its matrix factorizations cached. Evaluate many
// points against one PreparedCopula rather than calling the free functions in
// a loop.
//
// "Scores" are the per-coordinate transforms the density kernel works on:
// normal quantiles (Gaussian), t quantiles (StudentT), or u itself. Callers
// that revisit the same coordinates can compute them once.
class PreparedCopula {
 public:
  explicit PreparedCopula(CopulaSpec spec);

  const CopulaSpec& spec() const { return spec_; }

  Eigen::VectorXd scores(const Eigen::VectorXd& u) const;

  double log_density(const Eigen::VectorXd& u) const;
  double log_density(const Eigen::VectorXd& u, const Eigen::VectorXd& s) const;

  // Gradient of log c w.r.t. the free parameters.
  Eigen::VectorXd log_density_grad(const Eigen::VectorXd& u) const;
  Eigen::VectorXd log_density_grad(const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& s) const;

  // d log c / d u_which.
  double log_density_partial(const Eigen::VectorXd& u, int which) const;
  double log_density_partial(const Eigen::VectorXd& u, const Eigen::VectorXd& s,
                             int which) const;

 private:
  void check_point(const Eigen::VectorXd& u) const;

  CopulaSpec spec_;
  Eigen::MatrixXd precision_;
  Eigen::MatrixXd chol_lower_;
  double log_det_ = 0.0;
  double log_norm_ = 0.0;
};

double density(const CopulaSpec& spec, const Eigen::VectorXd& u);
double log_density(const CopulaSpec& spec, const Eigen::VectorXd& u);
Eigen::VectorXd log_density_grad(const CopulaSpec& spec,
                                 const Eigen::VectorXd& u);
// dc/du_which.
double density_partial_arg(const CopulaSpec& spec, const Eigen::VectorXd& u,
                           int which);
// Density of the covariate sub-copula at u_x (length dim - 1).
double covariate_margin_density(const CopulaSpec& spec,
                                const Eigen::VectorXd& u_x);

// n draws, one per row. Deterministic in the state of `rng`.
Eigen::MatrixXd sample(const CopulaSpec& spec, int n, RandomStream& rng);

// Nearest feasible CopulaSpec: scalars clamped (delta to [1e-4, 50], theta to
// [-0.999, 0.999]); matrices symmetrized, eigenvalues clipped at 1e-6 and
// rescaled to unit diagonal. Feasible inputs come back bit-identical.
CopulaSpec project_params(const CopulaSpec& spec);

// Population Kendall tau implied by a bivariate member of the family
// (`param` is delta, theta or rho).
double kendall_tau_of(Family family, double param);
// Inverse of kendall_tau_of (FGM is clamped to its attainable range).
double param_from_kendall_tau(Family family, double tau);

inline constexpr double kClaytonMin = 1e-4;
inline constexpr double kClaytonMax = 50.0;
inline constexpr double kFgmBound = 0.999;
inline constexpr double kEigenFloor = 1e-6;

}  // namespace copreg
