#include "specdep/copulas.hpp"

#include <cmath>
#include <stdexcept>

#include "specdep/errors.hpp"
#include "specdep/special.hpp"

namespace specdep {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Positive stable S with Laplace transform exp(-s^alpha), alpha in (0,1).
double positive_stable(double alpha, RngStream& rng) {
  const double v = kPi * rng.uniform01();
  const double e = rng.exponential();
  const double a = std::sin(alpha * v) / std::pow(std::sin(v), 1.0 / alpha);
  const double b = std::pow(std::sin((1.0 - alpha) * v) / e, (1.0 - alpha) / alpha);
  return a * b;
}

}  // namespace

Eigen::VectorXd sample_gumbel(int d, double lambda, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_gumbel: dimension must be positive");
  if (!(lambda >= 1.0)) throw InfeasibleError("sample_gumbel: lambda must be >= 1");
  Eigen::VectorXd u(d);
  if (lambda == 1.0) {
    for (int j = 0; j < d; ++j) u[j] = rng.uniform01();
    return u;
  }
  const double alpha = 1.0 / lambda;
  const double s = positive_stable(alpha, rng);
  for (int j = 0; j < d; ++j) u[j] = std::exp(-std::pow(rng.exponential() / s, alpha));
  return u;
}

Eigen::VectorXd sample_t_copula(int d, double nu, double rho, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_t_copula: dimension must be positive");
  if (!(nu > 0.0)) throw InfeasibleError("sample_t_copula: nu must be positive");
  const double min_rho = -1.0 / static_cast<double>(d - 1);
  if (!(rho > min_rho && rho < 1.0))
    throw InfeasibleError("sample_t_copula: equicorrelation matrix not positive definite for rho=" +
                          std::to_string(rho));
  // Square root of (1-rho) I + rho 11': a I + b 11'.
  const double a = std::sqrt(1.0 - rho);
  const double b = (std::sqrt(1.0 - rho + static_cast<double>(d) * rho) - a) / static_cast<double>(d);
  Eigen::VectorXd eps(d);
  for (int j = 0; j < d; ++j) eps[j] = rng.normal();
  const Eigen::VectorXd z = a * eps + b * eps.sum() * Eigen::VectorXd::Ones(d);
  const double w = rng.chi_square(nu) / nu;
  const double scale = 1.0 / std::sqrt(w);
  Eigen::VectorXd u(d);
  for (int j = 0; j < d; ++j) u[j] = student_t_cdf(z[j] * scale, nu);
  return u;
}

double frechet_quantile(double u, double alpha, double scale) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("frechet_quantile: u must lie in (0,1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("frechet_quantile: alpha must be positive");
  if (!(scale > 0.0)) throw std::invalid_argument("frechet_quantile: scale must be positive");
  return scale * std::pow(-std::log(u), -1.0 / alpha);
}

double ParamPath::operator()(double t) const {
  switch (kind) {
    case Kind::constant: return c0;
    case Kind::linear: return c0 + (c1 - c0) * t;
    case Kind::jump: return t <= t0 ? c0 : c1;
    case Kind::two_jumps: return (t > lo && t <= hi) ? c1 : c0;
  }
  return c0;
}

ParamPath ParamPath::constant(double c) {
  ParamPath p;
  p.kind = Kind::constant;
  p.c0 = p.c1 = c;
  return p;
}

ParamPath ParamPath::linear(double from, double to) {
  ParamPath p;
  p.kind = Kind::linear;
  p.c0 = from;
  p.c1 = to;
  return p;
}

ParamPath ParamPath::jump(double from, double to, double at) {
  ParamPath p;
  p.kind = Kind::jump;
  p.c0 = from;
  p.c1 = to;
  p.t0 = at;
  return p;
}

ParamPath ParamPath::two_jumps(double outside, double inside, double lo, double hi) {
  ParamPath p;
  p.kind = Kind::two_jumps;
  p.c0 = outside;
  p.c1 = inside;
  p.lo = lo;
  p.hi = hi;
  return p;
}

void Scenario::validate() const {
  if (n < 1) throw InfeasibleError("scenario: sample size must be positive");
  if (d < 2) throw InfeasibleError("scenario: dimension must be >= 2");
  if (!(margins.alpha > 0.0)) throw InfeasibleError("scenario: Frechet alpha must be positive");
  // The parameter path is piecewise between c0 and c1, so checking the two
  // levels covers all t.
  if (copula == Copula::gumbel) {
    if (!(path.c0 >= 1.0) || !(path.c1 >= 1.0))
      throw InfeasibleError("scenario: Gumbel lambda must be >= 1 for all t");
  } else {
    if (!(nu > 0.0)) throw InfeasibleError("scenario: t copula nu must be positive");
    if (!(path.c0 >= 0.0 && path.c0 < 1.0) || !(path.c1 >= 0.0 && path.c1 < 1.0))
      throw InfeasibleError("scenario: t copula rho must lie in [0,1) for all t");
  }
  if (path.kind == ParamPath::Kind::jump && !(path.t0 >= 0.0 && path.t0 <= 1.0))
    throw InfeasibleError("scenario: jump time must lie in [0,1]");
  if (path.kind == ParamPath::Kind::two_jumps && !(path.lo >= 0.0 && path.lo < path.hi && path.hi <= 1.0))
    throw InfeasibleError("scenario: two-jump interval must satisfy 0 <= lo < hi <= 1");
}

std::vector<TimedObservation> generate(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  std::vector<TimedObservation> sample(static_cast<std::size_t>(scenario.n));
  for (int i = 1; i <= scenario.n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(scenario.n);
    RngStream rng = RngStream::substream(seed, {static_cast<std::uint64_t>(i)});
    const double param = scenario.path(t);
    Eigen::VectorXd u;
    if (scenario.copula == Scenario::Copula::gumbel) {
      u = sample_gumbel(scenario.d, param, rng);
    } else {
      u = sample_t_copula(scenario.d, scenario.nu, param, rng);
    }
    Eigen::VectorXd x(scenario.d);
    for (int j = 0; j < scenario.d; ++j) {
      const double q = frechet_quantile(u[j], scenario.margins.alpha);
      switch (scenario.margins.kind) {
        case MarginSpec::Kind::frechet:
          x[j] = q;
          break;
        case MarginSpec::Kind::frechet_sine:
          x[j] = q * (1.0 + std::sin(2.0 * kPi * t) / 2.0);
          break;
        case MarginSpec::Kind::frechet_different:
          x[j] = j == 0 ? q : (q + 1.0) * static_cast<double>(j + 1);
          break;
      }
    }
    sample[static_cast<std::size_t>(i - 1)] = TimedObservation{t, std::move(x)};
  }
  return sample;
}

}  // namespace specdep
