#include "copreg/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "copreg/baselines.hpp"
#include "copreg/error.hpp"
#include "copreg/metrics.hpp"
#include "copreg/rng.hpp"

namespace copreg {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool has_oracle(DgpId id) {
  return id == DgpId::Ia || id == DgpId::Ib || id == DgpId::Ic || id == DgpId::IIa;
}

bool use_oracle(const ExperimentConfig& c) {
  switch (c.target) {
    case ImseTarget::Oracle: return true;
    case ImseTarget::Observed: return false;
    case ImseTarget::Auto: break;
  }
  return c.dgp == DgpId::Ia || c.dgp == DgpId::Ib || c.dgp == DgpId::Ic;
}

std::span<const double> row_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Fisher-Yates with draws from `rng`, so the split is the same on every
// standard library.
std::vector<Eigen::Index> permutation(Eigen::Index n, RandomStream& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(uniform_open(rng) * static_cast<double>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(std::min(j, i))]);
  }
  return idx;
}

Eigen::VectorXd predict_continuous(const MethodSpec& method, const ExperimentConfig& config,
                                   const Dataset& train, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  if (method.kind == MethodKind::OLS) return fit_ols(train).predict(x);
  const CRModel model = fit_cr(train, method.family, config.cr);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Eigen::VectorXd row = x.row(r).transpose();
    out[r] = model.predict_mean(row_span(row));
  }
  return out;
}

Eigen::VectorXd predict_binary(const MethodSpec& method, const ExperimentConfig& config,
                               std::uint64_t seed, const Dataset& train,
                               const Eigen::MatrixXd& x) {
  if (method.kind == MethodKind::Logit) return fit_logit(train).predict_prob(x);
  FitConfig fit = config.bocr;
  fit.seed = seed;
  const BocrFit result = fit_bocr(train, method.family, fit);
  return predict_prob(result.model, x);
}

struct Moments {
  double mean = 0.0, sd = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

MetricsReport run_continuous(const ExperimentConfig& config, const ProgressFn& progress) {
  RandomStream eval_rng = make_stream(config.base_seed, 1);
  const Dataset eval = generate(config.dgp, config.eval_size, eval_rng);
  std::vector<double> truth(static_cast<std::size_t>(eval.n()));
  for (Eigen::Index i = 0; i < eval.n(); ++i) {
    if (use_oracle(config)) {
      const Eigen::VectorXd row = eval.x.row(i).transpose();
      truth[static_cast<std::size_t>(i)] = oracle_m(config.dgp, row_span(row));
    } else {
      truth[static_cast<std::size_t>(i)] = eval.y[i];
    }
  }

  const std::size_t methods = config.methods.size();
  std::vector<std::vector<std::vector<double>>> predictions(methods);
  std::vector<int> failed(methods, 0);
  for (int l = 0; l < config.replications; ++l) {
    RandomStream rng = make_stream(config.base_seed + static_cast<std::uint64_t>(l), 0);
    const Dataset train = generate(config.dgp, config.n, rng);
    for (std::size_t m = 0; m < methods; ++m) {
      try {
        const Eigen::VectorXd p = predict_continuous(config.methods[m], config, train, eval.x);
        if (!p.allFinite()) throw NumericError("non-finite prediction");
        predictions[m].emplace_back(p.data(), p.data() + p.size());
      } catch (const Error&) {
        ++failed[m];
      }
    }
    if (progress) progress(l, config.replications);
  }

  MetricsReport report;
  report.config = config;
  for (std::size_t m = 0; m < methods; ++m) {
    MethodResult r;
    r.method = config.methods[m];
    r.completed = static_cast<int>(predictions[m].size());
    r.failed = failed[m];
    if (r.completed > 0) r.imse = imse_decompose(predictions[m], truth);
    report.results.push_back(std::move(r));
  }
  return report;
}

MetricsReport run_binary(const ExperimentConfig& config, const ProgressFn& progress) {
  const std::size_t methods = config.methods.size();
  std::vector<std::vector<double>> aucs(methods), kss(methods);
  std::vector<int> failed(methods, 0);
  for (int l = 0; l < config.replications; ++l) {
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(l);
    RandomStream rng = make_stream(seed, 0);
    const Dataset data = generate(config.dgp, config.n, rng);
    const std::vector<Eigen::Index> order = permutation(data.n(), rng);
    const std::span<const Eigen::Index> all(order);
    const Eigen::Index n_train = data.n() - config.eval_size;
    const Dataset train = data.subset(all.first(static_cast<std::size_t>(n_train)));
    const Dataset test = data.subset(all.subspan(static_cast<std::size_t>(n_train)));
    for (std::size_t m = 0; m < methods; ++m) {
      try {
        const Eigen::VectorXd p = predict_binary(config.methods[m], config, seed, train, test.x);
        if (!p.allFinite()) throw NumericError("non-finite prediction");
        const std::span<const double> s(p.data(), static_cast<std::size_t>(p.size()));
        aucs[m].push_back(auc(s, test.y_span()));
        kss[m].push_back(ks_stat(s, test.y_span()));
      } catch (const Error&) {
        ++failed[m];
      }
    }
    if (progress) progress(l, config.replications);
  }

  MetricsReport report;
  report.config = config;
  for (std::size_t m = 0; m < methods; ++m) {
    MethodResult r;
    r.method = config.methods[m];
    r.completed = static_cast<int>(aucs[m].size());
    r.failed = failed[m];
    if (r.completed > 0) {
      const Moments a = moments(aucs[m]);
      const Moments k = moments(kss[m]);
      r.auc = a.mean;
      r.auc_sd = a.sd;
      r.ks = k.mean;
      r.ks_sd = k.sd;
    }
    report.results.push_back(std::move(r));
  }
  return report;
}

std::string number(std::optional<double> v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string fixed(std::optional<double> v, int digits) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

std::string MethodSpec::name() const {
  switch (kind) {
    case MethodKind::OLS: return "OLS";
    case MethodKind::Logit: return "Logit";
    case MethodKind::CR: return "CR-" + std::string(family_name(family));
    case MethodKind::BOCR: return "BOCR-" + std::string(family_name(family));
  }
  return "?";
}

MethodSpec MethodSpec::parse(std::string_view text) {
  const std::string key = lower(text);
  if (key == "ols") return {MethodKind::OLS, Family::Gaussian};
  if (key == "logit") return {MethodKind::Logit, Family::Gaussian};
  const auto dash = key.find('-');
  if (dash != std::string::npos) {
    const std::string head = key.substr(0, dash);
    const std::string tail = key.substr(dash + 1);
    if (head == "cr") return {MethodKind::CR, parse_family(tail)};
    if (head == "bocr") return {MethodKind::BOCR, parse_family(tail)};
  }
  throw DomainError("unknown method '" + std::string(text) + "'");
}

bool ExperimentConfig::binary() const { return dgp_spec(dgp).binary; }

void ExperimentConfig::validate() const {
  if (replications < 1) throw ParameterError("replications must be at least 1");
  if (n < 10 || eval_size < 10) throw ParameterError("sample sizes must be at least 10");
  if (methods.empty()) throw ParameterError("no methods");
  const bool bin = binary();
  if (bin && n - eval_size < 10) {
    throw ParameterError("training part of the split must hold at least 10 observations");
  }
  for (const MethodSpec& m : methods) {
    if (m.binary() != bin) {
      throw ParameterError("method " + m.name() + " does not apply to DGP " +
                           std::string(dgp_name(dgp)));
    }
  }
  if (!bin && target == ImseTarget::Oracle && !has_oracle(dgp)) {
    throw ParameterError("DGP " + std::string(dgp_name(dgp)) + " has no closed-form target");
  }
  if (bin) bocr.validate();
}

MetricsReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  MetricsReport report = config.binary() ? run_binary(config, progress)
                                         : run_continuous(config, progress);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

BenchTable parse_bench_table(std::string_view text) {
  const std::string key = lower(text);
  if (key == "t1") return BenchTable::T1;
  if (key == "t2") return BenchTable::T2;
  if (key == "t4") return BenchTable::T4;
  throw DomainError("unknown table '" + std::string(text) + "' (expected T1, T2 or T4)");
}

std::string_view bench_table_name(BenchTable table) {
  switch (table) {
    case BenchTable::T1: return "T1";
    case BenchTable::T2: return "T2";
    case BenchTable::T4: return "T4";
  }
  return "?";
}

std::vector<ExperimentConfig> bench_configs(BenchTable table, std::uint64_t seed,
                                            const BenchOverrides& overrides) {
  struct Row {
    DgpId dgp;
    MethodSpec model;
  };
  std::vector<Row> rows;
  const MethodSpec ols{MethodKind::OLS, Family::Gaussian};
  const MethodSpec logit{MethodKind::Logit, Family::Gaussian};
  switch (table) {
    case BenchTable::T1:
      rows = {{DgpId::Ia, {MethodKind::CR, Family::Clayton}},
              {DgpId::Ib, {MethodKind::CR, Family::FGM}},
              {DgpId::Ic, {MethodKind::CR, Family::Gaussian}}};
      break;
    case BenchTable::T2:
      rows = {{DgpId::IIa, {MethodKind::CR, Family::Gaussian}},
              {DgpId::IIc, {MethodKind::CR, Family::Clayton}},
              {DgpId::IId, {MethodKind::CR, Family::StudentT}}};
      break;
    case BenchTable::T4:
      rows = {{DgpId::IIIa, {MethodKind::BOCR, Family::Clayton}},
              {DgpId::IIIb, {MethodKind::BOCR, Family::Gaussian}},
              {DgpId::IIIc, {MethodKind::BOCR, Family::Gaussian}}};
      break;
  }

  std::vector<ExperimentConfig> out;
  for (const Row& row : rows) {
    ExperimentConfig c;
    c.dgp = row.dgp;
    c.base_seed = seed;
    if (table == BenchTable::T4) {
      c.replications = 20;
      c.n = 300;
      c.eval_size = 100;
      c.methods = {logit, row.model};
    } else {
      c.replications = 200;
      c.n = 100;
      c.eval_size = 150;
      c.methods = {row.model, ols};
    }
    if (overrides.n) {
      c.n = *overrides.n;
      // Keep the 2:1 split of the binary designs.
      if (table == BenchTable::T4) c.eval_size = std::max(10, c.n / 3);
    }
    if (overrides.replications) c.replications = *overrides.replications;
    if (overrides.mc_samples) c.bocr.mc_samples = *overrides.mc_samples;
    if (overrides.max_iter) c.bocr.max_iter = *overrides.max_iter;
    if (overrides.step) c.bocr.step = *overrides.step;
    out.push_back(std::move(c));
  }
  return out;
}

void write_report_csv(std::ostream& out, BenchTable table,
                      const std::vector<MetricsReport>& rows) {
  out << "table,dgp,method,replications,completed,failed,n,eval_size,seed,"
         "imse,ibias,ivar,auc,auc_sd,ks,ks_sd\n";
  for (const MetricsReport& rep : rows) {
    for (const MethodResult& r : rep.results) {
      const auto field = [&](auto member) {
        return r.imse ? number((*r.imse).*member) : std::string();
      };
      out << bench_table_name(table) << ',' << dgp_name(rep.config.dgp) << ','
          << r.method.name() << ',' << rep.config.replications << ',' << r.completed << ','
          << r.failed << ',' << rep.config.n << ',' << rep.config.eval_size << ','
          << rep.config.base_seed << ',' << field(&ImseReport::imse) << ','
          << field(&ImseReport::ibias) << ',' << field(&ImseReport::ivar) << ','
          << number(r.auc) << ',' << number(r.auc_sd) << ',' << number(r.ks) << ','
          << number(r.ks_sd) << '\n';
    }
  }
}

void write_report_text(std::ostream& out, BenchTable table,
                       const std::vector<MetricsReport>& rows) {
  const bool binary = table == BenchTable::T4;
  out << "Table " << bench_table_name(table);
  if (!rows.empty()) {
    const ExperimentConfig& c = rows.front().config;
    out << "  seed=" << c.base_seed << "  N=" << c.replications << "  n=" << c.n
        << (binary ? "  test=" : "  I=") << c.eval_size;
  }
  out << '\n';
  if (binary) {
    out << pad("DGP", 6) << pad("Method", 16) << pad("AUC", 10) << pad("KS", 10)
        << pad("ok", 6) << pad("failed", 8) << '\n';
  } else {
    out << pad("DGP", 6) << pad("Method", 16) << pad("IMSE", 12) << pad("IBIAS", 12)
        << pad("IVAR", 12) << pad("ok", 6) << pad("failed", 8) << '\n';
  }
  for (const MetricsReport& rep : rows) {
    for (const MethodResult& r : rep.results) {
      out << pad(std::string(dgp_name(rep.config.dgp)), 6) << pad(r.method.name(), 16);
      if (binary) {
        out << pad(fixed(r.auc, 4), 10) << pad(fixed(r.ks, 4), 10);
      } else {
        const auto f = [&](double ImseReport::*member) {
          return r.imse ? fixed((*r.imse).*member, 6) : std::string("-");
        };
        out << pad(f(&ImseReport::imse), 12) << pad(f(&ImseReport::ibias), 12)
            << pad(f(&ImseReport::ivar), 12);
      }
      out << pad(std::to_string(r.completed), 6) << pad(std::to_string(r.failed), 8) << '\n';
    }
  }
}

}  // namespace copreg
