#include "copreg/dgp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "copreg/error.hpp"

namespace copreg {

std::string_view dgp_name(DgpId id) {
  switch (id) {
    case DgpId::Ia: return "Ia";
    case DgpId::Ib: return "Ib";
    case DgpId::Ic: return "Ic";
    case DgpId::IIa: return "IIa";
    case DgpId::IIc: return "IIc";
    case DgpId::IId: return "IId";
    case DgpId::IIIa: return "IIIa";
    case DgpId::IIIb: return "IIIb";
    case DgpId::IIIc: return "IIIc";
  }
  return "?";
}

DgpId parse_dgp(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c != '.') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (DgpId id : {DgpId::Ia, DgpId::Ib, DgpId::Ic, DgpId::IIa, DgpId::IIc,
                   DgpId::IId, DgpId::IIIa, DgpId::IIIb, DgpId::IIIc}) {
    std::string candidate(dgp_name(id));
    std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (candidate == key) return id;
  }
  throw DomainError("unknown DGP '" + std::string(name) + "'");
}

Eigen::MatrixXd design_correlation() {
  Eigen::MatrixXd s(4, 4);
  s << 1.00, 0.23, 0.90, 0.67,
       0.23, 1.00, 0.51, 0.26,
       0.90, 0.51, 1.00, 0.49,
       0.67, 0.26, 0.49, 1.00;
  return s;
}

Eigen::VectorXd logistic_design_beta() {
  Eigen::VectorXd b(4);
  b << 1.0, -1.0, -1.0, 1.0;
  return b;
}

double logistic_design_probability(const Eigen::VectorXd& x) {
  return 1.0 / (1.0 + std::exp(-x.dot(logistic_design_beta())));
}

DgpSpec dgp_spec(DgpId id) {
  const auto std_normal = MarginalModel::normal(0.0, 1.0);
  auto normals = [&](int d) { return std::vector<MarginalModel>(d, std_normal); };
  switch (id) {
    case DgpId::Ia:
      return {id, false, 1, CopulaSpec::clayton(kIaDelta, 2),
              MarginalModel::normal(kIaMeanY, kIaSdY), normals(1)};
    case DgpId::Ib:
      return {id, false, 1, CopulaSpec::fgm(kIbTheta),
              MarginalModel::normal(kIbMeanY, kIbSdY), {MarginalModel::gumbel()}};
    case DgpId::Ic:
    case DgpId::IIa:
      return {id, false, 3, CopulaSpec::gaussian(design_correlation()),
              MarginalModel::uniform01(), normals(3)};
    case DgpId::IIc:
      return {id, false, 2, CopulaSpec::clayton(kIIcDelta, 3),
              MarginalModel::beta(0.5, 0.5), normals(2)};
    case DgpId::IId:
      return {id, false, 3, CopulaSpec::student_t(design_correlation(), kIIdDf),
              MarginalModel::beta(0.5, 0.5), normals(3)};
    case DgpId::IIIa:
      return {id, true, 3, CopulaSpec::clayton(kIIIaDelta, 4),
              MarginalModel::uniform01(), normals(3)};
    case DgpId::IIIb:
      return {id, true, 3, CopulaSpec::gaussian(design_correlation()),
              MarginalModel::uniform01(), normals(3)};
    case DgpId::IIIc:
      return {id, true, 4, std::nullopt, MarginalModel::uniform01(), normals(4)};
  }
  throw DomainError("unknown DGP");
}

Dataset generate(DgpId id, int n, RandomStream& rng) {
  if (n < 1) throw DomainError("generate: n must be at least 1");
  const DgpSpec spec = dgp_spec(id);
  const int d = spec.covariates;
  Dataset data;
  data.binary = spec.binary;
  data.x.resize(n, d);
  data.y.resize(n);

  Eigen::VectorXd response(n);
  if (spec.copula) {
    const Eigen::MatrixXd u = sample(*spec.copula, n, rng);
    for (int r = 0; r < n; ++r) {
      response[r] = spec.response.quantile(u(r, 0));
      for (int j = 0; j < d; ++j) {
        data.x(r, j) = spec.covariate_margins[j].quantile(u(r, j + 1));
      }
    }
  } else {
    // IIIc: X ~ N(0, R) with the design correlation, Z = sigmoid(X beta).
    const Eigen::MatrixXd lower =
        Eigen::LLT<Eigen::MatrixXd>(design_correlation()).matrixL();
    Eigen::VectorXd z(d);
    for (int r = 0; r < n; ++r) {
      for (int j = 0; j < d; ++j) z[j] = standard_normal(rng);
      const Eigen::VectorXd x = lower * z;
      data.x.row(r) = x.transpose();
      response[r] = logistic_design_probability(x);
    }
  }

  if (spec.binary) {
    data.latent = response;
    for (int r = 0; r < n; ++r) {
      data.y[r] = uniform_open(rng) < response[r] ? 1.0 : 0.0;
    }
  } else {
    data.y = response;
  }
  return data;
}

}  // namespace copreg
