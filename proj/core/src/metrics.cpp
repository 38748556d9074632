#include "copreg/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "copreg/error.hpp"

namespace copreg {
namespace {

struct Ranked {
  std::vector<std::size_t> order;
  std::int64_t pos = 0;
  std::int64_t neg = 0;
};

Ranked rank_scores(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
  Ranked r;
  for (double l : labels) {
    if (l == 1.0) {
      ++r.pos;
    } else if (l == 0.0) {
      ++r.neg;
    } else {
      throw DomainError("labels must be 0 or 1");
    }
  }
  if (r.pos == 0 || r.neg == 0) throw DegenerateDataError("labels contain a single class");
  r.order.resize(scores.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return r;
}

// Calls visit(pos_in_group, neg_in_group) for each run of tied scores in
// ascending order.
template <typename Visit>
void for_each_tie_group(const Ranked& r, std::span<const double> scores,
                        std::span<const double> labels, Visit visit) {
  std::size_t i = 0;
  while (i < r.order.size()) {
    std::size_t j = i;
    std::int64_t gp = 0, gn = 0;
    while (j < r.order.size() && scores[r.order[j]] == scores[r.order[i]]) {
      (labels[r.order[j]] == 1.0 ? gp : gn) += 1;
      ++j;
    }
    visit(gp, gn);
    i = j;
  }
}

}  // namespace

double auc(std::span<const double> scores, std::span<const double> labels) {
  const Ranked r = rank_scores(scores, labels);
  // Twice the Mann-Whitney count, so ties stay integral.
  std::int64_t twice_u = 0;
  std::int64_t neg_below = 0;
  for_each_tie_group(r, scores, labels, [&](std::int64_t gp, std::int64_t gn) {
    twice_u += gp * (2 * neg_below + gn);
    neg_below += gn;
  });
  return static_cast<double>(twice_u) / static_cast<double>(2 * r.pos * r.neg);
}

double ks_stat(std::span<const double> scores, std::span<const double> labels) {
  const Ranked r = rank_scores(scores, labels);
  // Scaled ECDF gap |F+(t) n+ n- - F-(t) n+ n-| after each tie group.
  std::int64_t cum_pos = 0, cum_neg = 0, best = 0;
  for_each_tie_group(r, scores, labels, [&](std::int64_t gp, std::int64_t gn) {
    cum_pos += gp;
    cum_neg += gn;
    best = std::max(best, std::abs(cum_pos * r.neg - cum_neg * r.pos));
  });
  return static_cast<double>(best) / static_cast<double>(r.pos * r.neg);
}

double mean_squared_error(std::span<const double> predictions,
                          std::span<const double> targets) {
  if (predictions.size() != targets.size()) {
    throw ShapeError("predictions and targets differ in length");
  }
  if (predictions.empty()) throw InsufficientDataError("no predictions");
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - targets[i];
    acc += e * e;
  }
  return acc / static_cast<double>(predictions.size());
}

}  // namespace copreg
