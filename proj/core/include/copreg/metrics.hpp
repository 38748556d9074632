#pragma once

#include <span>

namespace copreg {

// Mann-Whitney AUC, P(score+ > score-) + P(score+ = score-) / 2. Labels are
// 0/1. Throws DegenerateDataError if a class is missing.
double auc(std::span<const double> scores, std::span<const double> labels);

// Largest |TPR - FPR| over all thresholds, i.e. the sup-distance between the
// two class-conditional score ECDFs.
double ks_stat(std::span<const double> scores, std::span<const double> labels);

double mean_squared_error(std::span<const double> predictions,
                          std::span<const double> targets);

}  // namespace copreg
