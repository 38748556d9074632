#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "copreg/cont_regression.hpp"
#include "copreg/dgp.hpp"
#include "copreg/error.hpp"
#include "copreg/rng.hpp"
#include "copreg/stats.hpp"
#include "support/oracles.hpp"

using namespace copreg;

namespace {

std::vector<MarginalModel> normals(int d) { return std::vector<MarginalModel>(d, MarginalModel::normal(0, 1)); }

Dataset independent_normals(int n, int d, std::uint64_t seed) {
  RandomStream rng = make_stream(seed);
  Dataset data;
  data.x.resize(n, d);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.y[i] = standard_normal(rng);
    for (int j = 0; j < d; ++j) data.x(i, j) = standard_normal(rng);
  }
  return data;
}

// Clustered Gauss-Legendre in v on (0, 1) with v = t^4 / (t^4 + (1-t)^4).
double unit_integral(const std::function<double(double)>& f) {
  static const oracle::Rule rule = oracle::gauss_legendre(2000);
  return oracle::integrate(rule, [&](double t) {
    const double a = std::pow(t, 4), b = std::pow(1 - t, 4);
    const double v = std::min(a / (a + b), 1.0 - 0x1p-53);
    return f(v) * 4 * std::pow(t * (1 - t), 3) / ((a + b) * (a + b));
  });
}

}  // namespace

TEST(PseudoMle, IndependenceRecovered) {
  const Dataset data = independent_normals(10000, 2, 1);
  const CRModel model = fit_cr(data, Family::Gaussian);
  const Eigen::MatrixXd r = model.copula().corr();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) EXPECT_LT(std::abs(r(i, j)), 0.03);
}

TEST(PseudoMle, ClaytonParameterRecovered) {
  RandomStream rng = make_stream(2);
  const Dataset data = generate(DgpId::Ia, 2000, rng);
  const CRModel model = fit_cr(data, Family::Clayton);
  EXPECT_GT(model.copula().scalar(), 0.85);
  EXPECT_LT(model.copula().scalar(), 1.15);
}

TEST(PseudoMle, StationaryAtOptimum) {
  RandomStream rng = make_stream(3);
  const Dataset data = generate(DgpId::Ic, 300, rng);
  PseudoMleResult summary;
  const CRModel model = fit_cr(data, Family::Gaussian, {}, &summary);
  const Eigen::MatrixXd u = pseudo_observations(data, model.margins_x(), model.margin_y());
  const Eigen::VectorXd g = pseudo_loglik_gradient(PreparedCopula(model.copula()), u);
  EXPECT_LT(g.norm(), 1e-4);
  EXPECT_LE(summary.gradient_norm, 1e-5);
  EXPECT_NEAR(summary.mean_loglik, pseudo_loglik(PreparedCopula(model.copula()), u), 1e-12);
}

TEST(PseudoMle, GradientMatchesFiniteDifferences) {
  RandomStream rng = make_stream(4);
  const Dataset data = generate(DgpId::Ic, 200, rng);
  std::vector<MarginalModel> mx;
  for (int j = 0; j < 3; ++j) {
    const Eigen::VectorXd col = data.x.col(j);
    mx.push_back(fit_empirical({col.data(), static_cast<std::size_t>(col.size())}));
  }
  const Eigen::MatrixXd u = pseudo_observations(data, mx, fit_empirical(data.y_span()));
  const CopulaSpec spec = initial_copula(u, Family::Gaussian);
  const Eigen::VectorXd g = pseudo_loglik_gradient(PreparedCopula(spec), u);
  const Eigen::VectorXd p = spec.params();
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    Eigen::VectorXd up = p, dn = p;
    up[k] += h;
    dn[k] -= h;
    const double fd = (pseudo_loglik(PreparedCopula(spec.with_params(up)), u) -
                       pseudo_loglik(PreparedCopula(spec.with_params(dn)), u)) /
                      (2 * h);
    EXPECT_NEAR(g[k], fd, 1e-6);
  }
}

TEST(PseudoMle, InitialCopulaFeasible) {
  RandomStream rng = make_stream(5);
  const Dataset data = generate(DgpId::IId, 150, rng);
  const CRModel model = fit_cr(data, Family::StudentT);
  EXPECT_NO_THROW(model.copula().validate());
  EXPECT_GT(model.copula().df(), 0.0);
}

TEST(FitCr, TooFewObservations) {
  EXPECT_THROW(fit_cr(independent_normals(10, 1, 6), Family::Gaussian), InsufficientDataError);
}

TEST(CrModel, DimensionMismatchIsShapeError) {
  EXPECT_THROW(CRModel(CopulaSpec::independent(Family::Gaussian, 3), normals(1), MarginalModel::normal(0, 1)),
               ShapeError);
}

TEST(CrModel, IdentityCopulaPredictsMean) {
  const Dataset data = independent_normals(60, 2, 7);
  const MarginalModel my = fit_empirical(data.y_span());
  const CRModel model(CopulaSpec::independent(Family::Gaussian, 3), normals(2), my);
  double ybar = 0;
  for (double v : data.y_span()) ybar += v;
  ybar /= data.n();
  for (double a : {-2.0, 0.0, 1.5}) {
    const std::vector<double> x{a, -a / 2};
    EXPECT_NEAR(predict_mean(model, x), ybar, 1e-6);
  }
}

TEST(CrModel, KnownFgmModelMatchesClosedForm) {
  const CRModel model(CopulaSpec::fgm(kIbTheta), {MarginalModel::gumbel()}, MarginalModel::normal(kIbMeanY, kIbSdY));
  for (double x : {-3.0, -1.0, -0.3, 0.0, 0.5, 1.2}) {
    const std::vector<double> v{x};
    EXPECT_NEAR(model.predict_mean(v), oracle_m(DgpId::Ib, v), 1e-6);
  }
}

TEST(CrModel, KnownGaussianModelMatchesClosedForm) {
  const CRModel model(CopulaSpec::gaussian(design_correlation()), normals(3), MarginalModel::uniform01());
  RandomStream rng = make_stream(8);
  for (int k = 0; k < 50; ++k) {
    const std::vector<double> x{standard_normal(rng), standard_normal(rng), standard_normal(rng)};
    EXPECT_NEAR(model.predict_mean(x), oracle_m(DgpId::Ic, x), 1e-3);
  }
}

TEST(CrModel, KnownClaytonModelMatchesIntegral) {
  const CRModel model(CopulaSpec::clayton(kIaDelta, 2), normals(1), MarginalModel::normal(kIaMeanY, kIaSdY));
  for (double x : {-1.5, 0.0, 1.0}) {
    const double u = oracle::phi(x);
    const double m = kIaMeanY + kIaSdY * unit_integral([&](double v) {
                       return oracle::phi_inv(v) * oracle::clayton2(v, u, kIaDelta);
                     });
    EXPECT_NEAR(model.predict_mean(std::vector<double>{x}), m, 1e-4);
  }
}

TEST(OracleM, FgmDesignValues) {
  // F(x) = 0.5 at x = log(log 2).
  EXPECT_NEAR(oracle_m(DgpId::Ib, std::vector<double>{std::log(std::log(2.0))}), 0.0, 1e-15);
  EXPECT_NEAR(oracle_m(DgpId::Ib, std::vector<double>{5.0}), 0.8 / std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_NEAR(oracle_m(DgpId::Ib, std::vector<double>{-40.0}), -0.8 / std::sqrt(std::numbers::pi), 1e-12);
}

TEST(OracleM, GaussianDesignAtOrigin) {
  EXPECT_DOUBLE_EQ(oracle_m(DgpId::Ic, std::vector<double>{0, 0, 0}), 0.5);
  EXPECT_EQ(oracle_m(DgpId::IIa, std::vector<double>{0.3, -1, 2}), oracle_m(DgpId::Ic, std::vector<double>{0.3, -1, 2}));
}

TEST(OracleM, ClaytonDesignMatchesIndependentIntegral) {
  for (double x : {-2.0, -0.5, 0.0, 0.7, 2.5}) {
    const double u = oracle::phi(x);
    const double m = kIaMeanY + kIaSdY * unit_integral([&](double v) {
                       return oracle::phi_inv(v) * oracle::clayton2(v, u, kIaDelta);
                     });
    EXPECT_NEAR(oracle_m(DgpId::Ia, std::vector<double>{x}), m, 1e-7) << x;
  }
}

TEST(OracleM, OtherDesignsRejected) {
  EXPECT_THROW(oracle_m(DgpId::IIc, std::vector<double>{0, 0}), DomainError);
  EXPECT_THROW(oracle_m(DgpId::Ib, std::vector<double>{0, 0}), ShapeError);
}

TEST(Imse, PerfectPredictions) {
  const std::vector<double> truth{1, 2, 3};
  const ImseReport r = imse_decompose({truth, truth}, truth);
  EXPECT_EQ(r.imse, 0.0);
  EXPECT_EQ(r.ibias, 0.0);
  EXPECT_EQ(r.ivar, 0.0);
}

TEST(Imse, SymmetricErrorsAreVarianceOnly) {
  const double c = 0.25;
  const std::vector<double> truth{0, 1, -1, 4};
  std::vector<double> up = truth, dn = truth;
  for (auto& v : up) v += c;
  for (auto& v : dn) v -= c;
  const ImseReport r = imse_decompose({up, dn}, truth);
  EXPECT_DOUBLE_EQ(r.imse, c * c);
  EXPECT_DOUBLE_EQ(r.ibias, 0.0);
  EXPECT_DOUBLE_EQ(r.ivar, c * c);
}

TEST(Imse, DecompositionAddsUp) {
  RandomStream rng = make_stream(9);
  std::vector<double> truth(20);
  for (double& v : truth) v = standard_normal(rng);
  std::vector<std::vector<double>> pred(5, std::vector<double>(20));
  for (auto& row : pred)
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = truth[i] + 0.3 + standard_normal(rng);
  const ImseReport r = imse_decompose(pred, truth);
  EXPECT_NEAR(r.imse, r.ibias + r.ivar, 1e-12);
  double direct = 0;
  for (const auto& row : pred)
    for (std::size_t i = 0; i < row.size(); ++i) direct += (row[i] - truth[i]) * (row[i] - truth[i]);
  EXPECT_NEAR(r.imse, direct / 100.0, 1e-12);
}

TEST(Imse, ShapeErrors) {
  EXPECT_THROW(imse_decompose({}, std::vector<double>{1.0}), ShapeError);
  EXPECT_THROW(imse_decompose({{1.0, 2.0}, {1.0}}, std::vector<double>{1.0, 2.0}), ShapeError);
}
