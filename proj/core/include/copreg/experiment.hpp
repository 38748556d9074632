#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "copreg/bocr.hpp"
#include "copreg/cont_regression.hpp"
#include "copreg/copula.hpp"
#include "copreg/dgp.hpp"

namespace copreg {

enum class MethodKind { CR, OLS, BOCR, Logit };

struct MethodSpec {
  MethodKind kind = MethodKind::OLS;
  Family family = Family::Gaussian;  // CR and BOCR only

  // "CR-Gaussian", "OLS", "BOCR-Clayton", "Logit".
  std::string name() const;
  // Case-insensitive inverse of name(); "cr-t" and "bocr-studentt" also work.
  static MethodSpec parse(std::string_view text);

  bool binary() const { return kind == MethodKind::BOCR || kind == MethodKind::Logit; }
};

// What IMSE compares predictions against on the continuous track.
enum class ImseTarget {
  // Closed-form m(x) for the I designs, observed y for the II designs.
  Auto,
  // Closed-form m(x); only designs with an oracle (Ia, Ib, Ic, IIa).
  Oracle,
  // Observed y at the evaluation points.
  Observed,
};

struct ExperimentConfig {
  DgpId dgp = DgpId::Ia;
  int replications = 200;
  // Training size (continuous designs) or total sample size before the
  // train/test split (binary designs).
  int n = 100;
  // Evaluation-set size I (continuous) or test-set size (binary).
  int eval_size = 150;
  std::vector<MethodSpec> methods;
  std::uint64_t base_seed = 0;
  ImseTarget target = ImseTarget::Auto;
  PseudoMleOptions cr;
  // step, mc_samples, max_iter, grad_tol, pooling and df are used; the seed
  // is derived per replication.
  FitConfig bocr;

  bool binary() const;
  // Throws ParameterError.
  void validate() const;
};

struct MethodResult {
  MethodSpec method;
  int completed = 0;
  int failed = 0;
  // Continuous designs, over completed replications.
  std::optional<ImseReport> imse;
  // Binary designs: means and standard deviations over completed
  // replications.
  std::optional<double> auc, auc_sd, ks, ks_sd;
};

struct MetricsReport {
  ExperimentConfig config;
  std::vector<MethodResult> results;
  double wall_seconds = 0.0;
};

// Progress hook: (replication index, replications).
using ProgressFn = std::function<void(int, int)>;

// Continuous designs: one evaluation set of eval_size points (stream 1 of
// base_seed), then replication l trains on a fresh sample from stream 0 of
// base_seed + l. IMSE is taken against `target`.
//
// Binary designs: replication l draws n observations from stream 0 of
// base_seed + l, splits off eval_size of them at random for testing, fits
// every method on the rest and scores AUC and KS on the test part.
//
// A method that throws in a replication is counted as failed there and left
// out of the averages.
MetricsReport run_experiment(const ExperimentConfig& config,
                             const ProgressFn& progress = {});

enum class BenchTable { T1, T2, T4 };

BenchTable parse_bench_table(std::string_view text);
std::string_view bench_table_name(BenchTable table);

struct BenchOverrides {
  std::optional<int> n;
  std::optional<int> replications;
  std::optional<int> mc_samples;
  std::optional<int> max_iter;
  std::optional<double> step;
};

// Rows of the table, in order, with defaults applied and then overrides.
std::vector<ExperimentConfig> bench_configs(BenchTable table, std::uint64_t seed,
                                            const BenchOverrides& overrides = {});

// One CSV line per (row, method). Deterministic: holds no timing.
void write_report_csv(std::ostream& out, BenchTable table,
                      const std::vector<MetricsReport>& rows);
// Aligned text table, one line per (row, method).
void write_report_text(std::ostream& out, BenchTable table,
                       const std::vector<MetricsReport>& rows);

}  // namespace copreg
