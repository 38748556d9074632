#pragma once

#include <vector>

namespace copreg {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on [a, b]. Nodes come from Newton iteration on
// the Legendre recurrence and are accurate to a few ulp for n up to several
// thousand.
QuadratureRule gauss_legendre(int n, double a = 0.0, double b = 1.0);

// `panels` equal sub-intervals of [a, b], each with a `per_panel`-point rule.
QuadratureRule composite_gauss_legendre(int panels, int per_panel, double a,
                                        double b);

// Gauss-Legendre in t on (0,1) pushed through v = t^p / (t^p + (1-t)^p).
// Nodes bunch up towards both ends of the unit interval, which tames the
// logarithmic endpoint growth of quantile functions and of copula densities.
// order = 1 is plain Gauss-Legendre.
QuadratureRule clustered_unit_rule(int n, int order = 3);

}  // namespace copreg
