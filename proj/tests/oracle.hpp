#ifndef SPECDEP_TESTS_ORACLE_HPP
#define SPECDEP_TESTS_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "specdep/rng.hpp"
#include "specdep/sample.hpp"

namespace specdep_oracle {

struct OracleStatistics {
  double t_ks = 0.0;
  double t_cm = 0.0;
};

// Brute-force statistics for bivariate samples, fully independent of the
// production prefix-sum machinery: full-sort order-statistic selection per
// block, a dense corner grid on [0,1], the sup of |D| over a dense t grid,
// and a midpoint Riemann sum for the integral of D^2. Corner columns with
// identical per-block measures are swept once (their t profiles coincide).
OracleStatistics brute_force_statistics(const std::vector<specdep::TimedObservation>& sample,
                                        int b, int k, std::size_t corner_grid_points = 10000,
                                        std::size_t t_grid_points = 1000000);

// A random small instance whose statistics the oracle can resolve exactly:
// block counts dividing 10^6 (so block boundaries sit on the dense t grid)
// and angles on a coarse lattice (so the corner grid separates all atoms).
struct OracleInstance {
  std::vector<specdep::TimedObservation> sample;
  int b = 0;
  int k = 0;
};

OracleInstance make_oracle_instance(specdep::RngStream& rng);

}  // namespace specdep_oracle

#endif  // SPECDEP_TESTS_ORACLE_HPP
