#include "copreg/copula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "copreg/error.hpp"
#include "copreg/special.hpp"

namespace copreg {
namespace {

constexpr double kMinEigenvalue = 1e-8;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

double clamp_unit(double u) {
  return std::clamp(u, kUnitFloor, 1.0 - kUnitFloor);
}

int matrix_param_count(int dim) { return dim * (dim - 1) / 2; }

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_unit_correlation(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 1.0) return false;
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (m(i, j) != m(j, i) || !std::isfinite(m(i, j))) return false;
    }
  }
  return true;
}

// Clayton pieces shared by density, gradient and partials.
struct ClaytonTerms {
  double sum_a = 0.0;   // sum of -log u_i
  double log_s = 0.0;   // log(sum u_i^-delta - (m - 1))
  double shift = 0.0;   // max_i delta * a_i
  double scaled_s = 0.0;  // S * exp(-shift)
};

ClaytonTerms clayton_terms(const Eigen::VectorXd& u, double delta) {
  ClaytonTerms t;
  const Eigen::Index m = u.size();
  double shift = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double a = -std::log(u[i]);
    t.sum_a += a;
    shift = std::max(shift, delta * a);
  }
  t.shift = shift;
  if (shift < 30.0) {
    // S = 1 + sum expm1(delta a_i) keeps precision for small delta.
    double excess = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) excess += std::expm1(-delta * std::log(u[i]));
    t.log_s = std::log1p(excess);
    t.scaled_s = (1.0 + excess) * std::exp(-shift);
  } else {
    double acc = -(m - 1.0) * std::exp(-shift);
    for (Eigen::Index i = 0; i < m; ++i) {
      acc += std::exp(-delta * std::log(u[i]) - shift);
    }
    t.scaled_s = acc;
    t.log_s = shift + std::log(acc);
  }
  return t;
}

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Gaussian: return "Gaussian";
    case Family::Clayton: return "Clayton";
    case Family::FGM: return "FGM";
    case Family::StudentT: return "StudentT";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  const std::string s = lower(name);
  if (s == "gaussian" || s == "normal") return Family::Gaussian;
  if (s == "clayton") return Family::Clayton;
  if (s == "fgm") return Family::FGM;
  if (s == "studentt" || s == "t" || s == "student-t") return Family::StudentT;
  throw DomainError("unknown copula family '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- CopulaSpec

CopulaSpec CopulaSpec::gaussian(Eigen::MatrixXd corr) {
  const int dim = static_cast<int>(corr.rows());
  return CopulaSpec(Family::Gaussian, dim, 0.0, std::move(corr), 0.0);
}

CopulaSpec CopulaSpec::student_t(Eigen::MatrixXd corr, double df) {
  const int dim = static_cast<int>(corr.rows());
  return CopulaSpec(Family::StudentT, dim, 0.0, std::move(corr), df);
}

CopulaSpec CopulaSpec::clayton(double delta, int dim) {
  return CopulaSpec(Family::Clayton, dim, delta, Eigen::MatrixXd(), 0.0);
}

CopulaSpec CopulaSpec::fgm(double theta) {
  return CopulaSpec(Family::FGM, 2, theta, Eigen::MatrixXd(), 0.0);
}

CopulaSpec CopulaSpec::independent(Family family, int dim, double df) {
  switch (family) {
    case Family::Gaussian:
      return gaussian(Eigen::MatrixXd::Identity(dim, dim));
    case Family::StudentT:
      return student_t(Eigen::MatrixXd::Identity(dim, dim), df);
    case Family::Clayton:
      return clayton(0.5, dim);
    case Family::FGM:
      if (dim != 2) throw ParameterError("FGM copula is bivariate only");
      return fgm(0.0);
  }
  throw ParameterError("unknown family");
}

int CopulaSpec::num_params() const {
  return elliptical() ? matrix_param_count(dim_) : 1;
}

Eigen::VectorXd CopulaSpec::params() const {
  if (!elliptical()) return Eigen::VectorXd::Constant(1, scalar_);
  Eigen::VectorXd p(num_params());
  int k = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) p[k++] = corr_(i, j);
  }
  return p;
}

CopulaSpec CopulaSpec::with_params(const Eigen::VectorXd& params) const {
  if (params.size() != num_params()) {
    throw ShapeError("with_params: expected " + std::to_string(num_params()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  CopulaSpec out = *this;
  if (!elliptical()) {
    out.scalar_ = params[0];
    return out;
  }
  int k = 0;
  for (int i = 0; i < dim_; ++i) {
    out.corr_(i, i) = 1.0;
    for (int j = i + 1; j < dim_; ++j) {
      out.corr_(i, j) = out.corr_(j, i) = params[k++];
    }
  }
  return out;
}

void CopulaSpec::validate() const {
  if (dim_ < 2) throw ParameterError("copula dimension must be at least 2");
  switch (family_) {
    case Family::Clayton:
      if (!(scalar_ > 0.0) || !std::isfinite(scalar_)) {
        throw ParameterError("Clayton delta must be positive");
      }
      return;
    case Family::FGM:
      if (dim_ != 2) throw ParameterError("FGM copula is bivariate only");
      if (!(std::abs(scalar_) <= 1.0)) {
        throw ParameterError("FGM theta must lie in [-1, 1]");
      }
      return;
    case Family::StudentT:
      if (!(df_ > 2.0) || !std::isfinite(df_)) {
        throw ParameterError("Student-t copula needs df > 2");
      }
      [[fallthrough]];
    case Family::Gaussian: {
      if (corr_.rows() != dim_ || corr_.cols() != dim_) {
        throw ParameterError("correlation matrix has the wrong shape");
      }
      if (!corr_.allFinite()) {
        throw ParameterError("correlation matrix has non-finite entries");
      }
      for (int i = 0; i < dim_; ++i) {
        if (std::abs(corr_(i, i) - 1.0) > 1e-12) {
          throw ParameterError("correlation matrix must have unit diagonal");
        }
        for (int j = i + 1; j < dim_; ++j) {
          if (std::abs(corr_(i, j) - corr_(j, i)) > 1e-12) {
            throw ParameterError("correlation matrix must be symmetric");
          }
        }
      }
      if (min_eigenvalue(corr_) < kMinEigenvalue) {
        throw ConditioningError("correlation matrix is near-singular");
      }
      return;
    }
  }
}

std::optional<CopulaSpec> CopulaSpec::covariate_block() const {
  if (dim_ <= 2) return std::nullopt;
  const int d = dim_ - 1;
  switch (family_) {
    case Family::Gaussian:
      return gaussian(corr_.bottomRightCorner(d, d));
    case Family::StudentT:
      return student_t(corr_.bottomRightCorner(d, d), df_);
    case Family::Clayton:
      return clayton(scalar_, d);
    case Family::FGM:
      return std::nullopt;
  }
  return std::nullopt;
}

// ------------------------------------------------------------ PreparedCopula

PreparedCopula::PreparedCopula(CopulaSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.elliptical()) {
    Eigen::LLT<Eigen::MatrixXd> llt(spec_.corr());
    if (llt.info() != Eigen::Success) {
      throw ConditioningError("correlation matrix is not positive definite");
    }
    chol_lower_ = llt.matrixL();
    precision_ = llt.solve(Eigen::MatrixXd::Identity(spec_.dim(), spec_.dim()));
    log_det_ = 2.0 * chol_lower_.diagonal().array().log().sum();
    if (spec_.family() == Family::StudentT) {
      const double nu = spec_.df();
      const double m = spec_.dim();
      log_norm_ = std::lgamma(0.5 * (nu + m)) +
                  (m - 1.0) * std::lgamma(0.5 * nu) -
                  m * std::lgamma(0.5 * (nu + 1.0));
    }
  } else if (spec_.family() == Family::Clayton) {
    double acc = 0.0;
    for (int k = 1; k < spec_.dim(); ++k) acc += std::log1p(k * spec_.scalar());
    log_norm_ = acc;
  }
}

void PreparedCopula::check_point(const Eigen::VectorXd& u) const {
  if (u.size() != spec_.dim()) {
    throw ShapeError("pseudo-observation has length " +
                     std::to_string(u.size()) + ", copula dimension is " +
                     std::to_string(spec_.dim()));
  }
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0 && u[i] < 1.0)) {
      throw DomainError("pseudo-observation coordinate " + std::to_string(i) +
                        " is not strictly inside (0,1)");
    }
  }
}

Eigen::VectorXd PreparedCopula::scores(const Eigen::VectorXd& u) const {
  check_point(u);
  switch (spec_.family()) {
    case Family::Gaussian: {
      Eigen::VectorXd s(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) s[i] = normal_quantile(u[i]);
      return s;
    }
    case Family::StudentT: {
      Eigen::VectorXd s(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        s[i] = student_t_quantile(u[i], spec_.df());
      }
      return s;
    }
    case Family::Clayton:
    case Family::FGM:
      return u;
  }
  return u;
}

double PreparedCopula::log_density(const Eigen::VectorXd& u) const {
  return log_density(u, scores(u));
}

double PreparedCopula::log_density(const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& s) const {
  switch (spec_.family()) {
    case Family::Gaussian: {
      const double quad = s.dot(precision_ * s) - s.squaredNorm();
      return -0.5 * log_det_ - 0.5 * quad;
    }
    case Family::StudentT: {
      const double nu = spec_.df();
      const double m = spec_.dim();
      const double q = s.dot(precision_ * s);
      double margins = 0.0;
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        margins += std::log1p(s[i] * s[i] / nu);
      }
      return log_norm_ - 0.5 * log_det_ - 0.5 * (nu + m) * std::log1p(q / nu) +
             0.5 * (nu + 1.0) * margins;
    }
    case Family::Clayton: {
      const double delta = spec_.scalar();
      const double m = spec_.dim();
      const ClaytonTerms t = clayton_terms(u, delta);
      return log_norm_ + (delta + 1.0) * t.sum_a - (1.0 / delta + m) * t.log_s;
    }
    case Family::FGM: {
      const double g = (1.0 - 2.0 * u[0]) * (1.0 - 2.0 * u[1]);
      return std::log1p(spec_.scalar() * g);
    }
  }
  return 0.0;
}

Eigen::VectorXd PreparedCopula::log_density_grad(const Eigen::VectorXd& u) const {
  return log_density_grad(u, scores(u));
}

Eigen::VectorXd PreparedCopula::log_density_grad(const Eigen::VectorXd& u,
                                                 const Eigen::VectorXd& s) const {
  switch (spec_.family()) {
    case Family::Gaussian:
    case Family::StudentT: {
      // d/dSigma of log c (entries treated as free) is
      //   Gaussian: 1/2 P s s' P - 1/2 P
      //   t:        (nu+m)/(2(nu+q)) P s s' P - 1/2 P
      // A free off-diagonal correlation moves two symmetric entries, so its
      // gradient is twice the (i,j) entry.
      const Eigen::VectorXd ps = precision_ * s;
      double scale = 1.0;
      if (spec_.family() == Family::StudentT) {
        const double nu = spec_.df();
        scale = (nu + spec_.dim()) / (nu + s.dot(ps));
      }
      const int dim = spec_.dim();
      Eigen::VectorXd g(spec_.num_params());
      int k = 0;
      for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
          g[k++] = scale * ps[i] * ps[j] - precision_(i, j);
        }
      }
      return g;
    }
    case Family::Clayton: {
      const double delta = spec_.scalar();
      const double m = spec_.dim();
      const ClaytonTerms t = clayton_terms(u, delta);
      // d S / d delta = sum a_i u_i^-delta, evaluated with the same shift.
      double weighted = 0.0;
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double a = -std::log(u[i]);
        weighted += a * std::exp(delta * a - t.shift);
      }
      double norm_grad = 0.0;
      for (int k = 1; k < spec_.dim(); ++k) norm_grad += k / (1.0 + k * delta);
      const double g = norm_grad + t.sum_a + t.log_s / (delta * delta) -
                       (1.0 / delta + m) * weighted / t.scaled_s;
      return Eigen::VectorXd::Constant(1, g);
    }
    case Family::FGM: {
      const double g = (1.0 - 2.0 * u[0]) * (1.0 - 2.0 * u[1]);
      return Eigen::VectorXd::Constant(1, g / (1.0 + spec_.scalar() * g));
    }
  }
  return {};
}

double PreparedCopula::log_density_partial(const Eigen::VectorXd& u,
                                           int which) const {
  return log_density_partial(u, scores(u), which);
}

double PreparedCopula::log_density_partial(const Eigen::VectorXd& u,
                                           const Eigen::VectorXd& s,
                                           int which) const {
  if (which < 0 || which >= spec_.dim()) {
    throw DomainError("coordinate index out of range");
  }
  switch (spec_.family()) {
    case Family::Gaussian: {
      // d log c / d s = -(P - I) s; chain through ds/du = 1 / phi(s).
      const double ds = -(precision_.row(which).dot(s) - s[which]);
      return ds / normal_pdf(s[which]);
    }
    case Family::StudentT: {
      const double nu = spec_.df();
      const double m = spec_.dim();
      const Eigen::VectorXd ps = precision_ * s;
      const double q = s.dot(ps);
      const double sj = s[which];
      const double ds = -(nu + m) / (nu + q) * ps[which] +
                        (nu + 1.0) * sj / (nu + sj * sj);
      return ds / student_t_pdf(sj, nu);
    }
    case Family::Clayton: {
      const double delta = spec_.scalar();
      const double m = spec_.dim();
      const ClaytonTerms t = clayton_terms(u, delta);
      const double uj = u[which];
      const double ratio = std::exp(-delta * std::log(uj) - t.shift) / t.scaled_s;
      return (-(delta + 1.0) + (1.0 + m * delta) * ratio) / uj;
    }
    case Family::FGM: {
      const double theta = spec_.scalar();
      const double c = 1.0 + theta * (1.0 - 2.0 * u[0]) * (1.0 - 2.0 * u[1]);
      const double other = u[1 - which];
      return -2.0 * theta * (1.0 - 2.0 * other) / c;
    }
  }
  return 0.0;
}

// ------------------------------------------------------------ free functions

double log_density(const CopulaSpec& spec, const Eigen::VectorXd& u) {
  return PreparedCopula(spec).log_density(u);
}

double density(const CopulaSpec& spec, const Eigen::VectorXd& u) {
  return std::exp(log_density(spec, u));
}

Eigen::VectorXd log_density_grad(const CopulaSpec& spec,
                                 const Eigen::VectorXd& u) {
  return PreparedCopula(spec).log_density_grad(u);
}

double density_partial_arg(const CopulaSpec& spec, const Eigen::VectorXd& u,
                           int which) {
  const PreparedCopula prepared(spec);
  const Eigen::VectorXd s = prepared.scores(u);
  return std::exp(prepared.log_density(u, s)) *
         prepared.log_density_partial(u, s, which);
}

double covariate_margin_density(const CopulaSpec& spec,
                                const Eigen::VectorXd& u_x) {
  spec.validate();
  if (u_x.size() != spec.dim() - 1) {
    throw ShapeError("covariate block has the wrong length");
  }
  for (Eigen::Index i = 0; i < u_x.size(); ++i) {
    if (!(u_x[i] > 0.0 && u_x[i] < 1.0)) {
      throw DomainError("covariate pseudo-observation not inside (0,1)");
    }
  }
  const auto block = spec.covariate_block();
  if (!block) return 1.0;
  return density(*block, u_x);
}

Eigen::MatrixXd sample(const CopulaSpec& spec, int n, RandomStream& rng) {
  if (n < 1) throw DomainError("sample size must be at least 1");
  spec.validate();
  const int dim = spec.dim();
  Eigen::MatrixXd out(n, dim);
  switch (spec.family()) {
    case Family::Gaussian:
    case Family::StudentT: {
      const Eigen::MatrixXd lower = Eigen::LLT<Eigen::MatrixXd>(spec.corr()).matrixL();
      Eigen::VectorXd z(dim);
      const bool is_t = spec.family() == Family::StudentT;
      const double nu = spec.df();
      for (int r = 0; r < n; ++r) {
        for (int i = 0; i < dim; ++i) z[i] = standard_normal(rng);
        Eigen::VectorXd x = lower * z;
        if (is_t) {
          const double chi2 = 2.0 * gamma_variate(0.5 * nu, rng);
          x *= std::sqrt(nu / chi2);
          for (int i = 0; i < dim; ++i) {
            out(r, i) = clamp_unit(student_t_cdf(x[i], nu));
          }
        } else {
          for (int i = 0; i < dim; ++i) out(r, i) = clamp_unit(normal_cdf(x[i]));
        }
      }
      return out;
    }
    case Family::Clayton: {
      // Marshall-Olkin: frailty V ~ Gamma(1/delta), U_i = (1 + E_i / V)^(-1/delta).
      const double delta = spec.scalar();
      for (int r = 0; r < n; ++r) {
        const double v = gamma_variate(1.0 / delta, rng);
        for (int i = 0; i < dim; ++i) {
          const double e = -std::log(uniform_open(rng));
          out(r, i) = clamp_unit(std::exp(-std::log1p(e / v) / delta));
        }
      }
      return out;
    }
    case Family::FGM: {
      // Conditional inversion of dC/du = v (1 + a (1 - v)), a = theta(1 - 2u).
      const double theta = spec.scalar();
      for (int r = 0; r < n; ++r) {
        const double u = uniform_open(rng);
        const double w = uniform_open(rng);
        const double a = theta * (1.0 - 2.0 * u);
        const double b = 1.0 + a;
        const double v = 2.0 * w / (b + std::sqrt(b * b - 4.0 * a * w));
        out(r, 0) = u;
        out(r, 1) = clamp_unit(v);
      }
      return out;
    }
  }
  return out;
}

CopulaSpec project_params(const CopulaSpec& spec) {
  switch (spec.family()) {
    case Family::Clayton: {
      double delta = spec.scalar();
      if (!std::isfinite(delta)) delta = delta > 0 ? kClaytonMax : kClaytonMin;
      return spec.with_params(
          Eigen::VectorXd::Constant(1, std::clamp(delta, kClaytonMin, kClaytonMax)));
    }
    case Family::FGM: {
      double theta = spec.scalar();
      if (std::isnan(theta)) theta = 0.0;
      return spec.with_params(
          Eigen::VectorXd::Constant(1, std::clamp(theta, -kFgmBound, kFgmBound)));
    }
    case Family::Gaussian:
    case Family::StudentT:
      break;
  }

  const Eigen::MatrixXd& in = spec.corr();
  if (is_unit_correlation(in) && min_eigenvalue(in) >= kEigenFloor) return spec;

  const Eigen::Index dim = in.rows();
  Eigen::MatrixXd m = in;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i])) m.data()[i] = 0.0;
  }
  m = 0.5 * (m + m.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(kEigenFloor);
  m = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::VectorXd inv_sd = m.diagonal().cwiseSqrt().cwiseInverse();
  m = inv_sd.asDiagonal() * m * inv_sd.asDiagonal();

  auto tidy = [dim](Eigen::MatrixXd& a) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      a(i, i) = 1.0;
      for (Eigen::Index j = i + 1; j < dim; ++j) a(j, i) = a(i, j);
    }
  };
  tidy(m);

  // Rescaling can push the smallest eigenvalue back under the floor; shrink
  // towards the identity until it clears with margin.
  for (int attempt = 0; attempt < 50; ++attempt) {
    const double lo = min_eigenvalue(m);
    if (lo >= kEigenFloor) break;
    const double target = 2.0 * kEigenFloor;
    const double w = std::min(1.0, (target - lo) / (1.0 - lo));
    m = (1.0 - w) * m + w * Eigen::MatrixXd::Identity(dim, dim);
    tidy(m);
  }

  if (spec.family() == Family::Gaussian) return CopulaSpec::gaussian(m);
  return CopulaSpec::student_t(m, spec.df());
}

double kendall_tau_of(Family family, double param) {
  switch (family) {
    case Family::Clayton: return param / (param + 2.0);
    case Family::FGM: return 2.0 * param / 9.0;
    case Family::Gaussian:
    case Family::StudentT: return 2.0 * std::asin(param) / kPi;
  }
  return 0.0;
}

double param_from_kendall_tau(Family family, double tau) {
  switch (family) {
    case Family::Clayton: {
      const double t = std::clamp(tau, 0.0, 0.99);
      return std::clamp(2.0 * t / (1.0 - t), kClaytonMin, kClaytonMax);
    }
    case Family::FGM:
      return std::clamp(4.5 * tau, -kFgmBound, kFgmBound);
    case Family::Gaussian:
    case Family::StudentT:
      return std::sin(kPi * std::clamp(tau, -1.0, 1.0) / 2.0);
  }
  return 0.0;
}

}  // namespace copreg
