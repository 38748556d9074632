#pragma once

namespace copreg {

inline constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

double student_t_pdf(double x, double df);
double student_t_cdf(double x, double df);
double student_t_quantile(double p, double df);

double beta_pdf(double x, double a, double b);
// Regularized incomplete beta I_x(a, b).
double beta_cdf(double x, double a, double b);
double beta_quantile(double p, double a, double b);

double digamma(double x);

}  // namespace copreg
