#ifndef SPECDEP_POWER_STUDY_HPP
#define SPECDEP_POWER_STUDY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specdep/copulas.hpp"
#include "specdep/limit_sim.hpp"
#include "specdep/stat_tests.hpp"

namespace specdep {

// A grid of scenarios x block lengths x exceedance counts, each cell run for
// R independent replications. Replication r of cell c draws its generation
// seed from substream (seed, c, r); together with per-observation and
// per-replication substreams further down this makes the whole study
// schedule-independent.
struct ExperimentPlan {
  std::vector<Scenario> scenarios;
  std::vector<int> block_lengths;
  std::vector<int> exceedance_counts;
  int replications = 200;
  std::vector<double> sizes = {0.05};
  std::uint64_t seed = 1;
  Norm norm = Norm::euclidean;
  std::size_t candidate_cap = 10000;
  // Critical source: a table (d = 2) and/or per-sample limit simulation.
  std::optional<CriticalTable> table;
  int per_sample_replications = 0;  // 0 = table route only
  int threads = 0;                  // 0 = hardware concurrency
};

struct CellResult {
  std::string scenario_id;
  double parameter = 0.0;
  int b = 0;
  int k = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  // rejections[size index] for each test.
  std::vector<int> ks_rejections;
  std::vector<int> cm_rejections;
  std::string infeasible;  // nonempty when the cell could not run

  double frequency_ks(std::size_t size_idx) const {
    return static_cast<double>(ks_rejections[size_idx]) / replications;
  }
  double frequency_cm(std::size_t size_idx) const {
    return static_cast<double>(cm_rejections[size_idx]) / replications;
  }
};

struct PowerTable {
  std::vector<double> sizes;
  std::vector<CellResult> cells;
  std::uint64_t seed = 0;
};

PowerTable run(const ExperimentPlan& plan);

// Sorted p-values of both tests under repeated sampling from one scenario
// cell; under the null their empirical law should track the uniform.
struct PValueSample {
  std::vector<double> ks;  // sorted ascending
  std::vector<double> cm;
};

PValueSample p_value_quantiles(const Scenario& scenario, int b, int k, int replications,
                               std::uint64_t seed, int per_sample_replications,
                               std::size_t candidate_cap = 10000, Norm norm = Norm::euclidean,
                               int threads = 0);

// Exact binomial standard error sqrt(p(1-p)/R) reported next to frequencies.
double mc_standard_error(double frequency, int replications);

}  // namespace specdep

#endif  // SPECDEP_POWER_STUDY_HPP
