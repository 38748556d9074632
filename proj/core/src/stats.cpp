#include "copreg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "copreg/error.hpp"

namespace copreg {
namespace {

// Number of tied pairs within runs of equal values in a sorted sequence.
template <class Eq>
std::int64_t tied_pairs(std::size_t n, Eq&& equal_to_prev) {
  std::int64_t total = 0;
  std::int64_t run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal_to_prev(i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  total += run * (run - 1) / 2;
  return total;
}

// Stable merge sort of `v`, returning the number of inversions.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf,
                         std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return swaps;
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw InsufficientDataError("mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw InsufficientDataError("sd needs two observations");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / (x.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("pearson: length mismatch");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("kendall_tau: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientDataError("kendall_tau needs two observations");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> ys(n), xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  const std::int64_t ties_x =
      tied_pairs(n, [&](std::size_t i) { return xs[i] == xs[i - 1]; });
  const std::int64_t ties_xy = tied_pairs(n, [&](std::size_t i) {
    return xs[i] == xs[i - 1] && ys[i] == ys[i - 1];
  });

  std::vector<double> buf(n);
  const std::int64_t swaps = merge_count(ys, buf, 0, n);
  const std::int64_t ties_y =
      tied_pairs(n, [&](std::size_t i) { return ys[i] == ys[i - 1]; });

  const std::int64_t total = static_cast<std::int64_t>(n) * (n - 1) / 2;
  const double numer = static_cast<double>(total - ties_x - ties_y + ties_xy) -
                       2.0 * static_cast<double>(swaps);
  const double denom = std::sqrt(static_cast<double>(total - ties_x) *
                                 static_cast<double>(total - ties_y));
  if (denom == 0.0) return 0.0;
  return numer / denom;
}

Eigen::MatrixXd kendall_tau_matrix(const Eigen::MatrixXd& data) {
  const Eigen::Index m = data.cols();
  Eigen::MatrixXd tau = Eigen::MatrixXd::Identity(m, m);
  std::vector<std::vector<double>> cols(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    cols[j].assign(data.col(j).data(), data.col(j).data() + data.rows());
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      tau(i, j) = tau(j, i) = kendall_tau(cols[i], cols[j]);
    }
  }
  return tau;
}

double ks_uniform_statistic(std::span<const double> sample) {
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    d = std::max(d, std::max((i + 1) / n - s[i], s[i] - i / n));
  }
  return d;
}

}  // namespace copreg
