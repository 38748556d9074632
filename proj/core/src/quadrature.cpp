#include "copreg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "copreg/error.hpp"
#include "copreg/special.hpp"

namespace copreg {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Ascending order: node i from the left is -x.
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

QuadratureRule composite_gauss_legendre(int panels, int per_panel, double a,
                                        double b) {
  if (panels < 1) throw DomainError("composite_gauss_legendre: panels < 1");
  const QuadratureRule base = gauss_legendre(per_panel, 0.0, 1.0);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * per_panel);
  rule.weights.reserve(rule.nodes.capacity());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * width;
    for (std::size_t k = 0; k < base.size(); ++k) {
      rule.nodes.push_back(left + width * base.nodes[k]);
      rule.weights.push_back(width * base.weights[k]);
    }
  }
  return rule;
}

QuadratureRule clustered_unit_rule(int n, int order) {
  QuadratureRule rule = gauss_legendre(n, 0.0, 1.0);
  if (order == 1) return rule;
  const double p = order;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double t = rule.nodes[k];
    const double a = std::pow(t, p);
    const double b = std::pow(1.0 - t, p);
    const double denom = a + b;
    // Keep extreme nodes representable as interior points.
    rule.nodes[k] = std::clamp(a / denom, std::numeric_limits<double>::min(),
                               std::nextafter(1.0, 0.0));
    rule.weights[k] *= p * std::pow(t * (1.0 - t), p - 1.0) / (denom * denom);
  }
  return rule;
}

}  // namespace copreg
