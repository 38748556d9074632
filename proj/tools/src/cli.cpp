#include "copreg_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "copreg/baselines.hpp"
#include "copreg/bocr.hpp"
#include "copreg/cont_regression.hpp"
#include "copreg/dgp.hpp"
#include "copreg/experiment.hpp"
#include "copreg/metrics.hpp"
#include "copreg_cli/csv.hpp"
#include "copreg_cli/model_file.hpp"

namespace copreg::cli {
namespace {

namespace fs = std::filesystem;

struct SimulateArgs {
  std::string dgp;
  int n = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool latent = false;
};

struct FitArgs {
  std::string task, family, train, out, pooling = "per-observation";
  std::optional<std::uint64_t> seed;
  FitConfig bocr;
  PseudoMleOptions cr;
};

struct PredictArgs {
  std::string model, input, out;
};

struct EvalArgs {
  std::string input, metrics = "auc,ks", out;
};

struct BenchArgs {
  std::string table, out = "bench";
  std::optional<std::uint64_t> seed;
  BenchOverrides overrides;
  bool quiet = false;
};

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

// `key = value` lines become `--key value` tokens placed right after the
// subcommand name, so that flags given on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  std::optional<std::string> path;
  std::size_t sub_pos = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (sub_pos == args.size() && !args[i].empty() && args[i][0] != '-') sub_pos = i;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path || sub_pos == args.size()) return args;
  CLI::App* sub = app.get_subcommand_no_throw(args[sub_pos]);
  if (!sub) return args;

  std::ifstream in(*path);
  if (!in) throw IoError("cannot open config '" + *path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(*path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    const CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (!opt) throw UsageError(*path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1" || value == "yes") tokens.push_back("--" + key);
    } else {
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1);
  out.insert(out.end(), tokens.begin(), tokens.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, args.end());
  return out;
}

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const DgpId id = parse_dgp(a.dgp);
  if (a.n < 1) throw UsageError("--n must be at least 1");
  const std::uint64_t seed = a.seed ? *a.seed : entropy_seed();
  RandomStream rng = make_stream(seed, 0);
  const Dataset data = generate(id, a.n, rng);

  CsvTable table;
  for (Eigen::Index j = 0; j < data.d(); ++j) table.header.push_back("x" + std::to_string(j + 1));
  table.header.push_back("y");
  const bool latent = a.latent && data.latent.has_value();
  if (latent) table.header.push_back("z_true");
  table.values.resize(data.n(), static_cast<Eigen::Index>(table.header.size()));
  table.values.leftCols(data.d()) = data.x;
  table.values.col(data.d()) = data.y;
  if (latent) table.values.col(data.d() + 1) = *data.latent;
  write_atomic(a.out, to_csv(table));
  out << "wrote " << data.n() << " rows to " << a.out << '\n';
}

std::string trace_line(const TraceRecord& r) {
  std::ostringstream s;
  s << "iter " << r.iteration << " loglik " << format_double(r.loglik) << " grad_theta "
    << format_double(r.grad_theta) << " grad_phi " << format_double(r.grad_phi) << " params";
  for (double v : r.params) s << ' ' << format_double(v);
  return s.str();
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const Family family = parse_family(a.family);
  const CsvTable table = read_csv(a.train);
  if (a.task == "cr") {
    const Dataset data = to_dataset(table, true, false);
    PseudoMleResult summary{CopulaSpec::independent(family, 2), 0, 0.0, 0.0};
    try {
      CRModel model = fit_cr(data, family, a.cr, &summary);
      save_model(a.out, model,
                 {"pseudo-mle iterations " + std::to_string(summary.iterations) +
                  " gradient_norm " + format_double(summary.gradient_norm) +
                  " mean_loglik " + format_double(summary.mean_loglik)});
    } catch (const ConvergenceError& e) {
      const std::string trace = a.out + ".trace";
      std::ostringstream s;
      s << "iterations " << e.iterations() << "\ngradient_norm " << format_double(e.gradient_norm())
        << "\nlast_iterate";
      for (double v : e.last_iterate()) s << ' ' << format_double(v);
      s << '\n';
      write_atomic(trace, s.str());
      err << "error: " << e.what() << "\ntrace written to " << trace << '\n';
      return kExitNumeric;
    }
  } else if (a.task == "bocr") {
    const Dataset data = to_dataset(table, true, true);
    if (data.y.size() == 0 || (data.y.array() == data.y[0]).all()) {
      throw UsageError("column 'y' has a single class; bocr needs both 0 and 1");
    }
    FitConfig config = a.bocr;
    config.seed = a.seed ? *a.seed : entropy_seed();
    if (a.pooling == "per-observation" || a.pooling == "per_observation") {
      config.pooling = Pooling::PerObservation;
    } else if (a.pooling == "pooled") {
      config.pooling = Pooling::Pooled;
    } else {
      throw UsageError("--pooling must be per-observation or pooled");
    }
    try {
      const BocrFit fit = fit_bocr(data, family, config);
      std::vector<std::string> comments{"seed " + std::to_string(config.seed) + " iterations " +
                                        std::to_string(fit.trace.size())};
      const std::size_t first = fit.trace.size() > 10 ? fit.trace.size() - 10 : 0;
      for (std::size_t i = first; i < fit.trace.size(); ++i) {
        comments.push_back(trace_line(fit.trace[i]));
      }
      save_model(a.out, fit.model, comments);
    } catch (const DivergenceError& e) {
      const std::string trace = a.out + ".trace";
      std::string text;
      for (const TraceRecord& r : e.trace()) text += trace_line(r) + '\n';
      write_atomic(trace, text);
      err << "error: " << e.what() << "\ntrace written to " << trace << '\n';
      return kExitNumeric;
    }
  } else {
    throw UsageError("--task must be cr or bocr");
  }
  out << "wrote model to " << a.out << '\n';
  return kExitOk;
}

void cmd_predict(const PredictArgs& a, std::ostream& out) {
  const FittedModel model = load_model(a.model);
  CsvTable table = read_csv(a.input);
  const Dataset data = to_dataset(table, false, false);
  const int expected = std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, CRModel>) {
          return static_cast<int>(m.margins_x().size());
        } else {
          return m.covariates();
        }
      },
      model);
  if (data.d() != expected) {
    throw UsageError("model expects " + std::to_string(expected) + " covariates, input has " +
                     std::to_string(data.d()));
  }
  Eigen::VectorXd pred(data.n());
  if (const auto* cr = std::get_if<CRModel>(&model)) {
    for (Eigen::Index r = 0; r < data.n(); ++r) {
      const Eigen::VectorXd row = data.x.row(r).transpose();
      pred[r] = cr->predict_mean({row.data(), static_cast<std::size_t>(row.size())});
    }
  } else if (data.n() > 0) {
    pred = predict_prob(std::get<BocrModel>(model), data.x);
  }
  table.header.push_back("prediction");
  table.values.conservativeResize(Eigen::NoChange, table.values.cols() + 1);
  table.values.col(table.values.cols() - 1) = pred;
  write_atomic(a.out, to_csv(table));
  out << "wrote " << data.n() << " predictions to " << a.out << '\n';
}

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  const CsvTable table = read_csv(a.input);
  const auto ycol = table.column("y");
  const auto pcol = table.column("prediction");
  if (!ycol) throw UsageError("missing column 'y'");
  if (!pcol) throw UsageError("missing column 'prediction'");
  const Eigen::VectorXd y = table.values.col(*ycol);
  const Eigen::VectorXd p = table.values.col(*pcol);
  const std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
  const std::span<const double> ps(p.data(), static_cast<std::size_t>(p.size()));

  std::string lines;
  std::stringstream names(a.metrics);
  std::string name;
  while (std::getline(names, name, ',')) {
    name = trim(name);
    double value = 0.0;
    if (name == "auc" || name == "ks") {
      for (double v : ys) {
        if (v != 0.0 && v != 1.0) throw UsageError("column 'y' must hold 0 or 1 for " + name);
      }
      value = name == "auc" ? auc(ps, ys) : ks_stat(ps, ys);
    } else if (name == "mse") {
      value = mean_squared_error(ps, ys);
    } else {
      throw UsageError("unknown metric '" + name + "' (expected auc, ks, mse)");
    }
    lines += name + "," + format_double(value) + "\n";
  }
  out << lines;
  if (!a.out.empty()) write_atomic(a.out, "metric,value\n" + lines);
}

void cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.seed) throw UsageError("bench requires --seed");
  const BenchTable table = parse_bench_table(a.table);
  const std::vector<ExperimentConfig> configs = bench_configs(table, *a.seed, a.overrides);
  std::vector<MetricsReport> reports;
  for (const ExperimentConfig& c : configs) {
    ProgressFn progress;
    if (!a.quiet) {
      progress = [&err, &c](int l, int total) {
        err << '\r' << dgp_name(c.dgp) << ": replication " << (l + 1) << '/' << total
            << (l + 1 == total ? "\n" : "") << std::flush;
      };
    }
    reports.push_back(run_experiment(c, progress));
  }

  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "'");
  const std::string stem(bench_table_name(table));
  std::ostringstream csv, text, timing;
  write_report_csv(csv, table, reports);
  write_report_text(text, table, reports);
  timing << "dgp,wall_seconds\n";
  for (const MetricsReport& r : reports) {
    timing << dgp_name(r.config.dgp) << ',' << format_double(r.wall_seconds) << '\n';
  }
  write_atomic(dir / (stem + ".csv"), csv.str());
  write_atomic(dir / (stem + ".txt"), text.str());
  write_atomic(dir / (stem + ".timing"), timing.str());
  out << text.str();
  for (const MetricsReport& r : reports) {
    out << "wall-time " << dgp_name(r.config.dgp) << ' ' << format_double(r.wall_seconds) << " s\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Copula regression for continuous and binary responses", "copreg"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string config_path;
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a dataset from a simulation design");
  simulate->add_option("--dgp", sim.dgp, "Design: Ia Ib Ic IIa IIc IId IIIa IIIb IIIc")->required();
  simulate->add_option("--n", sim.n, "Number of rows")->required();
  simulate->add_option("--seed", sim.seed, "RNG seed (default: entropy)");
  simulate->add_option("--out", sim.out, "Output CSV")->required();
  simulate->add_flag("--latent", sim.latent, "Add the z_true column for binary designs");
  simulate->add_option("--config", config_path, "key = value file");

  FitArgs fit;
  auto* fitc = app.add_subcommand("fit", "Fit a model to a CSV file");
  fitc->add_option("--task", fit.task, "cr or bocr")->required();
  fitc->add_option("--family", fit.family, "Gaussian, StudentT, Clayton or FGM")->required();
  fitc->add_option("--train", fit.train, "Training CSV")->required();
  fitc->add_option("--out", fit.out, "Model file")->required();
  fitc->add_option("--seed", fit.seed, "RNG seed for bocr (default: entropy)");
  fitc->add_option("--step", fit.bocr.step, "bocr step size")->capture_default_str();
  fitc->add_option("--mc-samples", fit.bocr.mc_samples, "bocr latent draws per observation")
      ->capture_default_str();
  fitc->add_option("--max-iter", fit.bocr.max_iter, "bocr iteration cap")->capture_default_str();
  fitc->add_option("--grad-tol", fit.bocr.grad_tol, "bocr gradient tolerance")->capture_default_str();
  fitc->add_option("--pooling", fit.pooling, "per-observation or pooled")->capture_default_str();
  fitc->add_option("--df", fit.bocr.df, "Student-t degrees of freedom for bocr")->capture_default_str();
  fitc->add_flag("--decay", fit.bocr.decay, "bocr step / sqrt(t + 1)");
  fitc->add_option("--config", config_path, "key = value file");

  PredictArgs pred;
  auto* predict = app.add_subcommand("predict", "Append model predictions to a CSV file");
  predict->add_option("--model", pred.model, "Model file")->required();
  predict->add_option("--input", pred.input, "Input CSV with x1..xd")->required();
  predict->add_option("--out", pred.out, "Output CSV")->required();
  predict->add_option("--config", config_path, "key = value file");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score a prediction column against y");
  eval->add_option("--input", ev.input, "CSV with y and prediction columns")->required();
  eval->add_option("--metrics", ev.metrics, "Comma list of auc, ks, mse")->capture_default_str();
  eval->add_option("--out", ev.out, "Optional metric CSV");
  eval->add_option("--config", config_path, "key = value file");

  BenchArgs bench;
  auto* benchc = app.add_subcommand("bench", "Reproduce a simulation table");
  benchc->add_option("--table", bench.table, "T1, T2 or T4")->required();
  benchc->add_option("--seed", bench.seed, "Base seed (required)");
  benchc->add_option("--out", bench.out, "Output directory")->capture_default_str();
  benchc->add_option("--n", bench.overrides.n, "Sample size override");
  benchc->add_option("--replications", bench.overrides.replications, "Replication count override");
  benchc->add_option("--mc-samples", bench.overrides.mc_samples, "bocr latent draws override");
  benchc->add_option("--max-iter", bench.overrides.max_iter, "bocr iteration cap override");
  benchc->add_option("--step", bench.overrides.step, "bocr step override");
  benchc->add_flag("--quiet", bench.quiet, "No progress output");
  benchc->add_option("--config", config_path, "key = value file");

  try {
    std::vector<std::string> tokens = expand_config(args, app);
    std::reverse(tokens.begin(), tokens.end());
    app.parse(tokens);
    if (simulate->parsed()) {
      cmd_simulate(sim, out);
    } else if (fitc->parsed()) {
      return cmd_fit(fit, out, err);
    } else if (predict->parsed()) {
      cmd_predict(pred, out);
    } else if (eval->parsed()) {
      cmd_eval(ev, out);
    } else if (benchc->parsed()) {
      cmd_bench(bench, out, err);
    }
    return kExitOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace copreg::cli
