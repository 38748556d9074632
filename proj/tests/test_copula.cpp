#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "copreg/copula.hpp"
#include "copreg/error.hpp"
#include "copreg/stats.hpp"
#include "support/oracles.hpp"

using namespace copreg;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Eigen::MatrixXd random_corr(int dim, RandomStream& rng) {
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = standard_normal(rng);
  Eigen::MatrixXd s = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::VectorXd d = s.diagonal().cwiseSqrt().cwiseInverse();
  s = d.asDiagonal() * s * d.asDiagonal();
  for (int i = 0; i < dim; ++i) {
    s(i, i) = 1.0;
    for (int j = 0; j < i; ++j) s(i, j) = s(j, i);
  }
  return s;
}

Eigen::VectorXd random_point(int dim, RandomStream& rng) {
  Eigen::VectorXd u(dim);
  for (int i = 0; i < dim; ++i) u[i] = 0.02 + 0.96 * uniform_open(rng);
  return u;
}

Eigen::VectorXd fd_param_grad(const CopulaSpec& spec, const Eigen::VectorXd& u, double h = 1e-6) {
  const Eigen::VectorXd p = spec.params();
  Eigen::VectorXd g(p.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    Eigen::VectorXd up = p, dn = p;
    up[k] += h;
    dn[k] -= h;
    g[k] = (log_density(spec.with_params(up), u) - log_density(spec.with_params(dn), u)) / (2 * h);
  }
  return g;
}

double fd_partial(const CopulaSpec& spec, Eigen::VectorXd u, int which, double h = 1e-6) {
  Eigen::VectorXd up = u, dn = u;
  up[which] += h;
  dn[which] -= h;
  return (density(spec, up) - density(spec, dn)) / (2 * h);
}

double norm_rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace

TEST(CopulaDensity, FgmAtCentreIsOne) {
  EXPECT_DOUBLE_EQ(density(CopulaSpec::fgm(0.8), vec({0.5, 0.5})), 1.0);
}

TEST(CopulaDensity, ClaytonAtCentre) {
  EXPECT_NEAR(density(CopulaSpec::clayton(1.0), vec({0.5, 0.5})), 32.0 / 27.0, 1e-14);
}

TEST(CopulaDensity, IdentityGaussianIsOne) {
  RandomStream rng = make_stream(1);
  for (int dim = 2; dim <= 5; ++dim) {
    const auto spec = CopulaSpec::gaussian(Eigen::MatrixXd::Identity(dim, dim));
    for (int k = 0; k < 20; ++k) EXPECT_NEAR(density(spec, random_point(dim, rng)), 1.0, 1e-14);
  }
}

TEST(CopulaDensity, MatchesClosedForms) {
  RandomStream rng = make_stream(2);
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd u = random_point(2, rng);
    EXPECT_LT(oracle::rel_err(density(CopulaSpec::clayton(2.5), u), oracle::clayton2(u[0], u[1], 2.5)), 1e-12);
    EXPECT_LT(oracle::rel_err(density(CopulaSpec::fgm(-0.4), u), oracle::fgm2(u[0], u[1], -0.4)), 1e-14);
    Eigen::Matrix2d r;
    r << 1, 0.7, 0.7, 1;
    EXPECT_LT(oracle::rel_err(density(CopulaSpec::gaussian(r), u), oracle::gauss2(u[0], u[1], 0.7)), 1e-10);
  }
}

TEST(CopulaDensity, GaussianMatchesDirectInverse) {
  RandomStream rng = make_stream(3);
  for (int k = 0; k < 30; ++k) {
    const Eigen::MatrixXd r = random_corr(4, rng);
    const Eigen::VectorXd u = random_point(4, rng);
    EXPECT_LT(oracle::rel_err(density(CopulaSpec::gaussian(r), u), oracle::gauss_copula(u, r)), 1e-9);
  }
}

TEST(CopulaDensity, BoundaryPointIsDomainError) {
  EXPECT_THROW(density(CopulaSpec::clayton(1.0), vec({0.0, 0.5})), DomainError);
  EXPECT_THROW(density(CopulaSpec::fgm(0.1), vec({0.5, 1.0})), DomainError);
  EXPECT_THROW(density(CopulaSpec::gaussian(Eigen::Matrix2d::Identity()), vec({0.5, 1.2})), DomainError);
}

TEST(CopulaDensity, WrongLengthIsShapeError) {
  EXPECT_THROW(density(CopulaSpec::clayton(1.0), vec({0.2, 0.5, 0.5})), ShapeError);
}

TEST(CopulaValidate, RejectsOutOfDomainParameters) {
  EXPECT_THROW(CopulaSpec::clayton(0.0).validate(), ParameterError);
  EXPECT_THROW(CopulaSpec::clayton(-1.0).validate(), ParameterError);
  EXPECT_THROW(CopulaSpec::fgm(1.2).validate(), ParameterError);
  EXPECT_THROW(CopulaSpec::student_t(Eigen::Matrix2d::Identity(), 2.0).validate(), ParameterError);
  Eigen::Matrix2d bad;
  bad << 1, 1, 1, 1;
  EXPECT_THROW(CopulaSpec::gaussian(bad).validate(), ConditioningError);
  EXPECT_THROW(density(CopulaSpec::fgm(1.5), vec({0.3, 0.3})), ParameterError);
}

TEST(CopulaGradient, IdentityGaussianAtMedianHasZeroOffDiagonal) {
  const auto g = log_density_grad(CopulaSpec::gaussian(Eigen::Matrix2d::Identity()), vec({0.5, 0.5}));
  ASSERT_EQ(g.size(), 1);
  EXPECT_EQ(g[0], 0.0);
}

TEST(CopulaGradient, FgmAnalytic) {
  const auto g = log_density_grad(CopulaSpec::fgm(0.3), vec({0.2, 0.7}));
  EXPECT_NEAR(g[0], -0.24 / 0.928, 1e-14);
}

TEST(CopulaGradient, ClaytonMatchesFiniteDifference) {
  const auto spec = CopulaSpec::clayton(1.0);
  const auto u = vec({0.3, 0.6});
  EXPECT_LT(oracle::rel_err(log_density_grad(spec, u)[0], fd_param_grad(spec, u)[0]), 1e-6);
}

TEST(CopulaGradient, RandomPointsAllFamilies) {
  RandomStream rng = make_stream(4);
  for (int k = 0; k < 100; ++k) {
    const int dim = 2 + k % 4;
    const Eigen::VectorXd u = random_point(dim, rng);
    const Eigen::MatrixXd r = random_corr(dim, rng);
    std::vector<CopulaSpec> specs{CopulaSpec::gaussian(r), CopulaSpec::student_t(r, 3.0 + k % 10),
                                  CopulaSpec::clayton(0.2 + 4.0 * uniform_open(rng), dim)};
    if (dim == 2) specs.push_back(CopulaSpec::fgm(1.8 * uniform_open(rng) - 0.9));
    for (const auto& spec : specs) {
      EXPECT_LT(norm_rel_err(log_density_grad(spec, u), fd_param_grad(spec, u)), 1e-5)
          << family_name(spec.family()) << " dim " << dim;
    }
  }
}

TEST(CopulaPartial, FgmAnalytic) {
  EXPECT_NEAR(density_partial_arg(CopulaSpec::fgm(0.8), vec({0.5, 0.3}), 1), 0.0, 1e-15);
  EXPECT_NEAR(density_partial_arg(CopulaSpec::fgm(0.5), vec({0.2, 0.4}), 1), -0.6, 1e-14);
}

TEST(CopulaPartial, ClaytonMatchesFiniteDifference) {
  const auto spec = CopulaSpec::clayton(1.0);
  const auto u = vec({0.4, 0.6});
  for (int which : {0, 1}) {
    EXPECT_LT(oracle::rel_err(density_partial_arg(spec, u, which), fd_partial(spec, u, which)), 1e-6);
  }
}

TEST(CopulaPartial, RandomPointsAllFamilies) {
  RandomStream rng = make_stream(5);
  for (int k = 0; k < 60; ++k) {
    const int dim = 2 + k % 3;
    const Eigen::VectorXd u = random_point(dim, rng);
    const Eigen::MatrixXd r = random_corr(dim, rng);
    std::vector<CopulaSpec> specs{CopulaSpec::gaussian(r), CopulaSpec::student_t(r, 5.0),
                                  CopulaSpec::clayton(0.3 + 3.0 * uniform_open(rng), dim)};
    if (dim == 2) specs.push_back(CopulaSpec::fgm(0.7));
    for (const auto& spec : specs) {
      const int which = k % dim;
      const double fd = fd_partial(spec, u, which);
      EXPECT_LT(std::abs(density_partial_arg(spec, u, which) - fd), 1e-5 * std::max(1.0, std::abs(fd)))
          << family_name(spec.family());
    }
  }
}

TEST(CopulaNormalization, BivariateFamiliesIntegrateToOne) {
  const oracle::Rule rule = oracle::gauss_legendre(200);
  Eigen::Matrix2d r;
  r << 1, 0.5, 0.5, 1;
  for (const auto& spec : {CopulaSpec::gaussian(r), CopulaSpec::student_t(r, 5.0),
                           CopulaSpec::clayton(1.0), CopulaSpec::fgm(0.8)}) {
    const PreparedCopula c(spec);
    double total = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
      for (std::size_t j = 0; j < rule.x.size(); ++j)
        total += rule.w[i] * rule.w[j] * std::exp(c.log_density(vec({rule.x[i], rule.x[j]})));
    EXPECT_NEAR(total, 1.0, 1e-3) << family_name(spec.family());
  }
}

TEST(CovariateMargin, IndependenceIsOne) {
  const auto spec = CopulaSpec::gaussian(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_NEAR(covariate_margin_density(spec, vec({0.2, 0.9})), 1.0, 1e-14);
}

TEST(CovariateMargin, GaussianSubBlockAtMedian) {
  Eigen::Matrix3d r;
  r << 1, 0.3, 0.2, 0.3, 1, 0.5, 0.2, 0.5, 1;
  EXPECT_NEAR(covariate_margin_density(CopulaSpec::gaussian(r), vec({0.5, 0.5})),
              1.0 / std::sqrt(1 - 0.25), 1e-12);
}

TEST(CovariateMargin, SingleCovariateIsUniform) {
  EXPECT_EQ(covariate_margin_density(CopulaSpec::fgm(0.6), vec({0.37})), 1.0);
  EXPECT_EQ(covariate_margin_density(CopulaSpec::clayton(2.0), vec({0.37})), 1.0);
}

TEST(CovariateMargin, EqualsIntegralOverResponse) {
  // Integrate c(v, u_x) over v after v = t^4 / (t^4 + (1-t)^4).
  const oracle::Rule rule = oracle::gauss_legendre(400);
  RandomStream rng = make_stream(6);
  for (int k = 0; k < 5; ++k) {
    const Eigen::MatrixXd r = random_corr(3, rng);
    const Eigen::VectorXd ux = random_point(2, rng);
    for (const auto& spec : {CopulaSpec::gaussian(r), CopulaSpec::student_t(r, 4.0),
                             CopulaSpec::clayton(1.5, 3)}) {
      const double integral = oracle::integrate(rule, [&](double t) {
        const double a = std::pow(t, 4), b = std::pow(1 - t, 4);
        // Nodes near t = 1 round v to 1; the mass lost there is below 1e-15.
        const double v = std::min(a / (a + b), 1.0 - 0x1p-53);
        const double dv = 4 * std::pow(t * (1 - t), 3) / ((a + b) * (a + b));
        return density(spec, vec({v, ux[0], ux[1]})) * dv;
      });
      EXPECT_LT(oracle::rel_err(covariate_margin_density(spec, ux), integral), 1e-6)
          << family_name(spec.family());
    }
  }
}

TEST(CopulaSample, DeterministicGivenSeed) {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  r(0, 1) = r(1, 0) = 0.4;
  for (const auto& spec : {CopulaSpec::gaussian(r), CopulaSpec::student_t(r, 5),
                           CopulaSpec::clayton(1.0, 3), CopulaSpec::fgm(0.5)}) {
    RandomStream a = make_stream(9), b = make_stream(9);
    EXPECT_EQ(sample(spec, 1000, a), sample(spec, 1000, b));
  }
}

TEST(CopulaSample, MarginsAreUniform) {
  Eigen::Matrix3d r;
  r << 1, 0.6, 0.3, 0.6, 1, 0.2, 0.3, 0.2, 1;
  const int n = 10000;
  for (const auto& spec : {CopulaSpec::gaussian(r), CopulaSpec::student_t(r, 4),
                           CopulaSpec::clayton(2.0, 3), CopulaSpec::fgm(-0.7)}) {
    RandomStream rng = make_stream(10);
    const Eigen::MatrixXd u = sample(spec, n, rng);
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const Eigen::VectorXd col = u.col(j);
      EXPECT_LT(ks_uniform_statistic({col.data(), static_cast<std::size_t>(n)}), 1.95 / std::sqrt(n));
      EXPECT_GT(col.minCoeff(), 0.0);
      EXPECT_LT(col.maxCoeff(), 1.0);
    }
  }
}

TEST(CopulaSample, IndependenceHasZeroTau) {
  RandomStream rng = make_stream(11);
  const Eigen::MatrixXd u = sample(CopulaSpec::gaussian(Eigen::Matrix3d::Identity()), 100000, rng);
  const Eigen::MatrixXd tau = kendall_tau_matrix(u);
  EXPECT_LT((tau - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 0.01);
}

TEST(CopulaSample, MultivariateClaytonPairsShareTau) {
  RandomStream rng = make_stream(12);
  const Eigen::MatrixXd u = sample(CopulaSpec::clayton(1.0, 4), 20000, rng);
  const Eigen::MatrixXd tau = kendall_tau_matrix(u);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) EXPECT_NEAR(tau(i, j), 1.0 / 3.0, 0.02);
}

TEST(ProjectParams, ClampsScalars) {
  EXPECT_EQ(project_params(CopulaSpec::fgm(1.3)).scalar(), 0.999);
  EXPECT_EQ(project_params(CopulaSpec::fgm(-4)).scalar(), -0.999);
  EXPECT_EQ(project_params(CopulaSpec::clayton(-0.2)).scalar(), 1e-4);
  EXPECT_EQ(project_params(CopulaSpec::clayton(80)).scalar(), 50.0);
}

TEST(ProjectParams, FeasibleMatrixUnchanged) {
  RandomStream rng = make_stream(13);
  const Eigen::MatrixXd r = random_corr(4, rng);
  const auto out = project_params(CopulaSpec::gaussian(r));
  EXPECT_EQ((out.corr() - r).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ProjectParams, RepairsIndefiniteMatrix) {
  Eigen::Matrix3d m;
  m << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
  ASSERT_LT(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m).eigenvalues().minCoeff(), -0.1);
  const auto out = project_params(CopulaSpec::gaussian(m));
  const Eigen::Matrix3d c = out.corr();
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(c).eigenvalues().minCoeff(), 1e-6);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(c(i, i), 1.0);
  EXPECT_EQ((c - c.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NO_THROW(out.validate());
}

TEST(ProjectParams, Idempotent) {
  RandomStream rng = make_stream(14);
  for (int k = 0; k < 50; ++k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) m(i, j) = m(j, i) = 2.4 * uniform_open(rng) - 1.2;
    const auto once = project_params(CopulaSpec::gaussian(m));
    const auto twice = project_params(once);
    EXPECT_EQ(once.params(), twice.params());
  }
}

TEST(KendallTau, AnalyticRoundTrip) {
  EXPECT_NEAR(kendall_tau_of(Family::Clayton, 1.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(kendall_tau_of(Family::FGM, 0.8), 2 * 0.8 / 9, 1e-15);
  EXPECT_NEAR(kendall_tau_of(Family::Gaussian, 0.5), 2 * std::asin(0.5) / std::numbers::pi, 1e-15);
  for (double p : {0.2, 1.0, 3.0}) {
    EXPECT_NEAR(param_from_kendall_tau(Family::Clayton, kendall_tau_of(Family::Clayton, p)), p, 1e-12);
  }
  EXPECT_NEAR(param_from_kendall_tau(Family::Gaussian, kendall_tau_of(Family::Gaussian, -0.3)), -0.3, 1e-12);
}

TEST(FamilyNames, ParseRoundTrip) {
  for (Family f : {Family::Gaussian, Family::Clayton, Family::FGM, Family::StudentT}) {
    EXPECT_EQ(parse_family(family_name(f)), f);
  }
  EXPECT_EQ(parse_family("t"), Family::StudentT);
  EXPECT_EQ(parse_family("CLAYTON"), Family::Clayton);
  EXPECT_THROW(parse_family("gumbel"), DomainError);
}
