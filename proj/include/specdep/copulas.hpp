#ifndef SPECDEP_COPULAS_HPP
#define SPECDEP_COPULAS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "specdep/rng.hpp"
#include "specdep/sample.hpp"

namespace specdep {

// One draw from the d-variate Gumbel copula with parameter lambda >= 1, via
// the positive-stable frailty construction: S with Laplace transform
// exp(-s^(1/lambda)) (Chambers-Mallows-Stuck), independent unit exponentials
// E_j, and U_j = exp(-(E_j/S)^(1/lambda)). lambda = 1 gives independence.
Eigen::VectorXd sample_gumbel(int d, double lambda, RngStream& rng);

// One draw from the d-variate t copula with nu > 0 degrees of freedom and
// equicorrelation rho in (-1/(d-1), 1). Uses the closed-form square root of
// the equicorrelation matrix and the regularized-incomplete-beta t cdf.
Eigen::VectorXd sample_t_copula(int d, double nu, double rho, RngStream& rng);

// Quantile of the Frechet law F(x) = exp(-(x/scale)^(-alpha)).
double frechet_quantile(double u, double alpha, double scale = 1.0);

// Dependence parameter as a function of time.
struct ParamPath {
  enum class Kind { constant, linear, jump, two_jumps };
  Kind kind = Kind::constant;
  double c0 = 0.0;       // base value (outside value for two_jumps)
  double c1 = 0.0;       // end / post-jump / inside value
  double t0 = 0.5;       // jump time (value c1 for t > t0)
  double lo = 0.0;       // two_jumps: c1 on (lo, hi], c0 elsewhere
  double hi = 1.0;

  double operator()(double t) const;

  static ParamPath constant(double c);
  static ParamPath linear(double from, double to);
  static ParamPath jump(double from, double to, double at);
  static ParamPath two_jumps(double outside, double inside, double lo, double hi);
};

// Marginal transform applied to the copula draw. "sine" multiplies the whole
// vector by 1 + sin(2 pi t)/2; "different" keeps coordinate 1 plain and maps
// coordinate i >= 2 to (q + 1) * i.
struct MarginSpec {
  enum class Kind { frechet, frechet_sine, frechet_different };
  Kind kind = Kind::frechet;
  double alpha = 4.0;
};

struct Scenario {
  std::string id;
  double parameter = 0.0;  // optional curve coordinate for power plots
  int n = 2000;
  int d = 2;
  enum class Copula { gumbel, t } copula = Copula::gumbel;
  double nu = 2.0;  // t copula only
  ParamPath path = ParamPath::constant(2.0);
  MarginSpec margins;

  void validate() const;
};

// Draws the full sample: observation i sits at t = i/n, uses the dependence
// parameter path(t), and pushes the copula vector through the margins.
// Observation i draws from substream (seed, i), so generation parallelizes
// without changing output.
std::vector<TimedObservation> generate(const Scenario& scenario, std::uint64_t seed);

}  // namespace specdep

#endif  // SPECDEP_COPULAS_HPP
