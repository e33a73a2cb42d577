#ifndef SPECDEP_LIMIT_SIM_HPP
#define SPECDEP_LIMIT_SIM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "specdep/estimator.hpp"
#include "specdep/rng.hpp"

namespace specdep {

// Brownian bridge on a sorted grid with endpoints 0 and 1: a Gaussian random
// walk with increment variance equal to the grid spacing, pinned by
// B(t) = W(t) - t W(1). Exactly zero at both endpoints.
Eigen::VectorXd simulate_bridge(const Eigen::VectorXd& grid, RngStream& rng);

struct BridgePanel {
  Eigen::VectorXd grid;
  Eigen::MatrixXd draws;  // replications x grid points
};

BridgePanel simulate_bridge_panel(const Eigen::VectorXd& grid, int replications,
                                  std::uint64_t seed, int threads = 1);

// One Brownian pillow on a square grid, simulated exactly from cumulative
// sums of a Brownian sheet: W(s,t) = S(s,t) - s S(1,t) - t S(s,1) + st S(1,1).
// values(i, j) is W at (grid[i], grid[j]); the whole boundary is exactly zero.
struct PillowDraw {
  Eigen::VectorXd grid_s;
  Eigen::VectorXd grid_t;
  Eigen::MatrixXd values;
};

PillowDraw simulate_pillow(double grid_step, RngStream& rng);

// Simulated upper quantiles of the limiting null distributions in d = 2:
// sup |W| and the sup over t of the s-integral of W^2 (trapezoidal in s).
struct CriticalTable {
  std::vector<double> sizes;  // ascending nominal sizes
  std::vector<double> ks;     // aligned critical values, sup-type statistic
  std::vector<double> cm;     // aligned critical values, integral-type statistic
  double grid_step = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;

  double ks_critical(double size) const;
  double cm_critical(double size) const;
};

CriticalTable pillow_critical_values(double grid_step, int replications,
                                     std::vector<double> sizes, std::uint64_t seed,
                                     int threads = 1);

// The estimated limit process built on the atoms of the integrated measure:
// one independent Brownian bridge per atom, combined as
//   Z_t(A) = sum_{l in A} sqrt(p_l) B_l(t) - P(A) sum_l sqrt(p_l) B_l(t)
// on the time grid {2h i, i = 0..J} (extended by 1 after truncation) and the
// candidate columns. Masses are normalized by their own total so the
// full-sphere column vanishes exactly.
class LimitProcessSimulator {
 public:
  // grid_refine subdivides every block interval into that many equal steps;
  // the default 1 keeps the block-boundary grid, which mirrors the
  // discretization of the statistics but is coarse for long blocks.
  LimitProcessSimulator(const SpectralPath& path, LowerSetFamily family, int grid_refine = 1);

  const Eigen::VectorXd& grid() const { return grid_; }
  std::size_t column_count() const { return column_mass_.size(); }
  // Normalized integrated mass of each column (closed corners then open).
  const std::vector<double>& column_mass() const { return column_mass_; }
  std::size_t atom_count() const { return sqrt_mass_.size(); }

  // One draw of Z over (grid point, column).
  Eigen::MatrixXd draw(RngStream& rng) const;

  // sup |Z| and sup over columns of the exact integral of the squared
  // piecewise-linear interpolant of Z.
  std::pair<double, double> draw_functionals(RngStream& rng) const;

 private:
  LowerSetFamily family_;
  Eigen::VectorXd grid_;
  std::vector<std::size_t> closed_idx_;
  std::vector<std::size_t> open_idx_;
  std::vector<double> sqrt_mass_;
  std::vector<double> column_mass_;  // size 2C, normalized
};

struct LimitSimResult {
  double p_ks = 1.0;
  double p_cm = 1.0;
  std::vector<double> ks_draws;  // sorted ascending
  std::vector<double> cm_draws;  // sorted ascending
};

// p-values by the add-one rule (1 + #{draw >= observed}) / (1 + replications),
// with replication r drawing from substream (seed, r).
LimitSimResult estimated_limit_p_values(const SpectralPath& path, const LowerSetFamily& family,
                                        double t_ks, double t_cm, int replications,
                                        std::uint64_t seed, int threads = 1,
                                        int grid_refine = 1);

// Empirical upper quantile used for critical values: the ceil((1-size) R)-th
// order statistic. Requires size * R >= 10 so the tail is actually resolved.
double upper_quantile(const std::vector<double>& sorted_draws, double size);

}  // namespace specdep

#endif  // SPECDEP_LIMIT_SIM_HPP
