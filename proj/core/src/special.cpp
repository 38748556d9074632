#include "copreg/special.hpp"

#include <cmath>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "copreg/error.hpp"

namespace copreg {
namespace {

// Evaluate in double rather than the default long double: the incomplete beta
// sits in the inner loop of the latent sampler.
using DoublePolicy =
    boost::math::policies::policy<boost::math::policies::promote_double<false>>;

}  // namespace

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile: probability outside (0,1)");
  }
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double student_t_pdf(double x, double df) {
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) -
                          std::lgamma(0.5 * df) -
                          0.5 * std::log(df * kPi);
  return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

double student_t_cdf(double x, double df) {
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), x);
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("student_t_quantile: probability outside (0,1)");
  }
  return boost::math::quantile(boost::math::students_t_distribution<double>(df),
                               p);
}

double beta_pdf(double x, double a, double b) {
  if (!(x > 0.0 && x < 1.0)) return 0.0;
  return boost::math::ibeta_derivative(a, b, x, DoublePolicy());
}

double beta_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x, DoublePolicy());
}

double beta_quantile(double p, double a, double b) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("beta_quantile: probability outside (0,1)");
  }
  return boost::math::ibeta_inv(a, b, p);
}

double digamma(double x) { return boost::math::digamma(x); }

}  // namespace copreg
