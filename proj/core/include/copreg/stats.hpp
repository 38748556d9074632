#pragma once

#include <span>

#include <Eigen/Core>

namespace copreg {

double mean(std::span<const double> x);

// Sample standard deviation with the n-1 denominator.
double sample_sd(std::span<const double> x);

double pearson(std::span<const double> x, std::span<const double> y);

// Kendall's tau-b in O(n log n) (Knight's merge-sort count). Equals tau-a
// when there are no ties.
double kendall_tau(std::span<const double> x, std::span<const double> y);

// Pairwise Kendall tau matrix of the columns of `data`.
Eigen::MatrixXd kendall_tau_matrix(const Eigen::MatrixXd& data);

// Largest |F_n(x) - x| over the sample: one-sample Kolmogorov-Smirnov
// statistic against Uniform(0,1).
double ks_uniform_statistic(std::span<const double> sample);

}  // namespace copreg
