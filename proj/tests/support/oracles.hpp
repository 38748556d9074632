#pragma once

// Reference implementations used only by the tests. They deliberately avoid
// the library's own numerics.

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct Rule {
  std::vector<double> x, w;
};

// Gauss-Legendre on (a, b) from the eigen-decomposition of the Jacobi matrix.
inline Rule gauss_legendre(int n, double a = 0.0, double b = 1.0) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = j(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Rule r;
  for (int k = 0; k < n; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    r.x.push_back(a + (b - a) * 0.5 * (es.eigenvalues()[k] + 1.0));
    r.w.push_back((b - a) * v0 * v0);
  }
  return r;
}

inline double integrate(const Rule& r, const std::function<double(double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(r.x[i]);
  return acc;
}

inline double phi_inv(double p) {
  // Acklam's rational approximation refined by two Halley steps on erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00, 2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p > 1 - 0.02425) {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  for (int it = 0; it < 2; ++it) {
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    x = x - u / (1 + x * u / 2);
  }
  return x;
}

inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double clayton2(double u, double v, double d) {
  return (1 + d) * std::pow(u * v, -d - 1) *
         std::pow(std::pow(u, -d) + std::pow(v, -d) - 1, -1 / d - 2);
}

inline double fgm2(double u, double v, double t) {
  return 1 + t * (1 - 2 * u) * (1 - 2 * v);
}

inline double gauss2(double u, double v, double rho) {
  const double a = phi_inv(u), b = phi_inv(v);
  const double q = 1 - rho * rho;
  return std::exp(-(rho * rho * (a * a + b * b) - 2 * rho * a * b) / (2 * q)) / std::sqrt(q);
}

// Full multivariate Gaussian copula density by direct inversion.
inline double gauss_copula(const Eigen::VectorXd& u, const Eigen::MatrixXd& r) {
  Eigen::VectorXd t(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) t[i] = phi_inv(u[i]);
  const Eigen::MatrixXd inv = r.inverse();
  const double quad = t.dot((inv - Eigen::MatrixXd::Identity(u.size(), u.size())) * t);
  return std::exp(-0.5 * quad) / std::sqrt(r.determinant());
}

// Counts pairs directly.
inline double brute_auc(std::span<const double> s, std::span<const double> y) {
  long long gt = 0, eq = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < s.size(); ++i) (y[i] == 1 ? pos : neg) += 1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      if (s[i] > s[j]) ++gt;
      if (s[i] == s[j]) ++eq;
    }
  }
  return static_cast<double>(2 * gt + eq) / static_cast<double>(2 * pos * neg);
}

// Tries every observed score as a threshold (plus one below all of them).
inline double brute_ks(std::span<const double> s, std::span<const double> y) {
  long long pos = 0, neg = 0;
  for (double v : y) (v == 1 ? pos : neg) += 1;
  long long best = 0;
  std::vector<double> thresholds(s.begin(), s.end());
  for (double t : thresholds) {
    long long tp = 0, fp = 0;  // counts of scores <= t
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] <= t) (y[i] == 1 ? tp : fp) += 1;
    }
    best = std::max(best, std::llabs(tp * neg - fp * pos));
  }
  return static_cast<double>(best) / static_cast<double>(pos * neg);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace oracle
