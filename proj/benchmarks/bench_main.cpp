#include <benchmark/benchmark.h>

#include <vector>

#include "copreg/bocr.hpp"
#include "copreg/cont_regression.hpp"
#include "copreg/copula.hpp"
#include "copreg/dgp.hpp"
#include "copreg/metrics.hpp"
#include "copreg/rng.hpp"

using namespace copreg;

namespace {

Eigen::MatrixXd points(int n, int dim, std::uint64_t seed) {
  RandomStream rng = make_stream(seed);
  Eigen::MatrixXd u(n, dim);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = uniform_open(rng);
  return u;
}

CopulaSpec family_spec(int which) {
  switch (which) {
    case 0: return CopulaSpec::gaussian(design_correlation());
    case 1: return CopulaSpec::student_t(design_correlation(), 5.0);
    case 2: return CopulaSpec::clayton(1.0, 4);
    default: return CopulaSpec::fgm(0.5);
  }
}

void BM_LogDensity(benchmark::State& state) {
  const PreparedCopula c(family_spec(static_cast<int>(state.range(0))));
  const Eigen::MatrixXd u = points(256, c.spec().dim(), 1);
  Eigen::Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(c.log_density(u.row(i).transpose()));
    i = (i + 1) % u.rows();
  }
  state.SetLabel(std::string(family_name(c.spec().family())));
}
BENCHMARK(BM_LogDensity)->DenseRange(0, 3);

void BM_LogDensityGrad(benchmark::State& state) {
  const PreparedCopula c(family_spec(static_cast<int>(state.range(0))));
  const Eigen::MatrixXd u = points(256, c.spec().dim(), 2);
  Eigen::Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(c.log_density_grad(u.row(i).transpose()));
    i = (i + 1) % u.rows();
  }
  state.SetLabel(std::string(family_name(c.spec().family())));
}
BENCHMARK(BM_LogDensityGrad)->DenseRange(0, 3);

void BM_ScoreGradients(benchmark::State& state) {
  RandomStream rng = make_stream(3);
  const Dataset data = generate(DgpId::IIIa, static_cast<int>(state.range(0)), rng);
  std::vector<MarginalModel> margins;
  for (Eigen::Index j = 0; j < data.d(); ++j) {
    const Eigen::VectorXd col = data.x.col(j);
    margins.push_back(fit_empirical({col.data(), static_cast<std::size_t>(col.size())}));
  }
  const BocrModel model = initial_bocr_model(Family::Clayton, margins);
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_gradients(model, data, 50, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 50);
}
BENCHMARK(BM_ScoreGradients)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_PredictMean(benchmark::State& state) {
  const CRModel model(CopulaSpec::gaussian(design_correlation()),
                      std::vector<MarginalModel>(3, MarginalModel::normal(0, 1)), MarginalModel::uniform01());
  const std::vector<double> x{0.3, -0.2, 1.1};
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_mean(x));
}
BENCHMARK(BM_PredictMean)->Unit(benchmark::kMicrosecond);

void BM_PredictProb(benchmark::State& state) {
  const BocrModel model{CopulaSpec::clayton(1.0, 4), LatentParams{0.3, -0.2},
                        std::vector<MarginalModel>(3, MarginalModel::normal(0, 1))};
  const Eigen::MatrixXd x = points(100, 3, 4).array() - 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(predict_prob(model, x));
  state.SetItemsProcessed(state.iterations() * x.rows());
}
BENCHMARK(BM_PredictProb)->Unit(benchmark::kMicrosecond);

void BM_Auc(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RandomStream rng = make_stream(5);
  std::vector<double> s(n), y(n);
  for (int i = 0; i < n; ++i) {
    s[i] = uniform_open(rng);
    y[i] = uniform_open(rng) < s[i] ? 1.0 : 0.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(auc(s, y));
}
BENCHMARK(BM_Auc)->Arg(100)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
