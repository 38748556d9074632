#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "copreg/copula.hpp"
#include "copreg/dataset.hpp"
#include "copreg/marginals.hpp"
#include "copreg/rng.hpp"

namespace copreg {

// Simulation designs. I*: continuous response with closed-form regression
// function; II*: continuous response scored against observed y; III*: binary
// response with latent success probability Z.
enum class DgpId { Ia, Ib, Ic, IIa, IIc, IId, IIIa, IIIb, IIIc };

std::string_view dgp_name(DgpId id);
// Accepts "Ia", "I.a", "IIIc", "III.c" and so on, case-insensitively.
DgpId parse_dgp(std::string_view name);

// The 4x4 correlation matrix shared by Ic, IIa, IId, IIIb and IIIc. Row and
// column 0 belong to the response (or to Z).
Eigen::MatrixXd design_correlation();

// Regression coefficients of IIIc.
Eigen::VectorXd logistic_design_beta();

// IIIc success probability sigmoid(x'beta).
double logistic_design_probability(const Eigen::VectorXd& x);

inline constexpr double kIaDelta = 1.0;
inline constexpr double kIaMeanY = 1.0;
inline constexpr double kIaSdY = 1.0;
inline constexpr double kIbTheta = 0.8;
inline constexpr double kIbMeanY = 0.0;
inline constexpr double kIbSdY = 1.0;
inline constexpr double kIIcDelta = 1.0;
inline constexpr double kIIdDf = 5.0;
inline constexpr double kIIIaDelta = 1.0;

struct DgpSpec {
  DgpId id;
  bool binary;
  int covariates;
  // Copula of (response or Z, X_1..X_d); empty for IIIc.
  std::optional<CopulaSpec> copula;
  // Marginal of the response (or of Z for binary designs).
  MarginalModel response;
  std::vector<MarginalModel> covariate_margins;
};

DgpSpec dgp_spec(DgpId id);

// Copula designs: draw pseudo-observations and map them through the marginal
// quantiles. IIIc: correlated normal covariates, Z = sigmoid(x'beta). Binary
// designs then draw y ~ Bernoulli(Z) and keep Z in Dataset::latent.
Dataset generate(DgpId id, int n, RandomStream& rng);

}  // namespace copreg
