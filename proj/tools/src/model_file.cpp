#include "copreg_cli/model_file.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "copreg_cli/csv.hpp"

namespace copreg::cli {
namespace {

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_margin(std::ostream& out, const std::string& name, const MarginalModel& m) {
  if (m.kind() != MarginalKind::Empirical) {
    throw UsageError("only empirical covariate margins can be stored");
  }
  out << "margin " << name << " empirical " << full(m.bandwidth()) << ' '
      << m.sorted_sample().size();
  for (double v : m.sorted_sample()) out << ' ' << full(v);
  out << '\n';
}

double read_double(std::istringstream& in, const std::string& what) {
  std::string tok;
  if (!(in >> tok)) throw UsageError("model file: missing value for " + what);
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) throw UsageError("model file: bad number '" + tok + "'");
  return v;
}

MarginalModel read_margin(std::istringstream& in) {
  std::string kind;
  in >> kind;
  if (kind != "empirical") throw UsageError("model file: unsupported margin '" + kind + "'");
  const double h = read_double(in, "bandwidth");
  long count = 0;
  if (!(in >> count) || count < 1) throw UsageError("model file: bad margin size");
  std::vector<double> sample(static_cast<std::size_t>(count));
  for (double& v : sample) v = read_double(in, "margin sample");
  return MarginalModel::empirical(std::move(sample), h);
}

}  // namespace

std::string serialize_model(const FittedModel& model, const std::vector<std::string>& comments) {
  std::ostringstream out;
  out << kModelTag << '\n';
  const CopulaSpec& spec = std::holds_alternative<CRModel>(model)
                               ? std::get<CRModel>(model).copula()
                               : std::get<BocrModel>(model).copula;
  out << "task " << (std::holds_alternative<CRModel>(model) ? "cr" : "bocr") << '\n';
  out << "family " << family_name(spec.family()) << '\n';
  out << "dim " << spec.dim() << '\n';
  out << "df " << full(spec.df()) << '\n';
  out << "params";
  for (double v : spec.params()) out << ' ' << full(v);
  out << '\n';
  if (const auto* cr = std::get_if<CRModel>(&model)) {
    out << "nodes " << cr->quadrature_nodes() << '\n';
    for (std::size_t j = 0; j < cr->margins_x().size(); ++j) {
      write_margin(out, "x" + std::to_string(j + 1), cr->margins_x()[j]);
    }
    write_margin(out, "y", cr->margin_y());
  } else {
    const auto& b = std::get<BocrModel>(model);
    out << "latent " << full(b.latent.log_alpha) << ' ' << full(b.latent.log_beta) << '\n';
    for (std::size_t j = 0; j < b.margins_x.size(); ++j) {
      write_margin(out, "x" + std::to_string(j + 1), b.margins_x[j]);
    }
  }
  for (const std::string& c : comments) out << "# " << c << '\n';
  return out.str();
}

FittedModel parse_model(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  if (!std::getline(lines, line) || line != kModelTag) {
    throw UsageError("not a copreg model file (expected '" + std::string(kModelTag) + "')");
  }
  std::string task, family;
  int dim = 0, nodes = kMeanQuadratureNodes;
  double df = 5.0;
  Eigen::VectorXd params;
  std::optional<LatentParams> latent;
  std::map<std::string, MarginalModel> margins;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string key;
    in >> key;
    if (key == "task") {
      in >> task;
    } else if (key == "family") {
      in >> family;
    } else if (key == "dim") {
      in >> dim;
    } else if (key == "df") {
      df = read_double(in, "df");
    } else if (key == "nodes") {
      in >> nodes;
    } else if (key == "params") {
      std::vector<double> v;
      std::string tok;
      while (in >> tok) {
        std::istringstream one(tok);
        v.push_back(read_double(one, "params"));
      }
      params = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (key == "latent") {
      LatentParams p;
      p.log_alpha = read_double(in, "log alpha");
      p.log_beta = read_double(in, "log beta");
      latent = p;
    } else if (key == "margin") {
      std::string name;
      in >> name;
      margins.insert_or_assign(name, read_margin(in));
    } else {
      throw UsageError("model file: unknown key '" + key + "'");
    }
  }
  if (dim < 2) throw UsageError("model file: bad or missing dim");
  const Family fam = parse_family(family);
  CopulaSpec spec = CopulaSpec::independent(fam, dim, df);
  if (params.size() != spec.num_params()) {
    throw UsageError("model file: expected " + std::to_string(spec.num_params()) +
                     " copula parameters, found " + std::to_string(params.size()));
  }
  spec = spec.with_params(params);
  spec.validate();

  std::vector<MarginalModel> xs;
  for (int j = 1; j < dim; ++j) {
    const auto it = margins.find("x" + std::to_string(j));
    if (it == margins.end()) throw UsageError("model file: missing margin x" + std::to_string(j));
    xs.push_back(it->second);
  }
  if (task == "cr") {
    const auto it = margins.find("y");
    if (it == margins.end()) throw UsageError("model file: missing margin y");
    return CRModel(std::move(spec), std::move(xs), it->second, nodes);
  }
  if (task == "bocr") {
    if (!latent) throw UsageError("model file: missing latent line");
    return BocrModel{std::move(spec), *latent, std::move(xs)};
  }
  throw UsageError("model file: unknown task '" + task + "'");
}

void save_model(const std::filesystem::path& path, const FittedModel& model,
                const std::vector<std::string>& comments) {
  write_atomic(path, serialize_model(model, comments));
}

FittedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace copreg::cli
