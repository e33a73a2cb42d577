#include "specdep/power_study.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specdep/errors.hpp"
#include "specdep/parallel.hpp"

namespace specdep {

namespace {

struct ReplicationOutcome {
  std::vector<bool> ks_reject;
  std::vector<bool> cm_reject;
  double p_ks = 1.0;
  double p_cm = 1.0;
};

// One full pipeline pass: generate, decompose, estimate, test, decide.
ReplicationOutcome run_replication(const Scenario& scenario, int b, int k, Norm norm,
                                   std::size_t cap, const std::vector<double>& sizes,
                                   const std::optional<CriticalTable>& table,
                                   int per_sample_reps, std::uint64_t gen_seed) {
  const BlockScheme scheme(scenario.n, b, k);  // validates (b, k) before the expensive draw
  const std::vector<TimedObservation> sample = generate(scenario, gen_seed);
  const std::vector<AngularPoint> points = decompose(sample, norm);
  const Partition part = partition(scheme, points);
  std::vector<BlockEstimate> estimates;
  estimates.reserve(part.blocks.size());
  for (const Block& block : part.blocks) estimates.push_back(local_estimate(block, k));
  const SpectralPath path = integrated_path(scheme, std::move(estimates));

  std::vector<AngularPoint> exceedances;
  exceedances.reserve(path.blocks().size() * static_cast<std::size_t>(k));
  for (const BlockEstimate& est : path.blocks())
    exceedances.insert(exceedances.end(), est.selected.begin(), est.selected.end());
  const LowerSetFamily family = enumerate_candidate_sets(exceedances, scenario.d, cap);
  const MeasureTable measures(path, family);
  TestReport report = make_report(measures);

  if (table && scenario.d == 2) {
    decide_with_table(report, *table, sizes);
  } else if (per_sample_reps > 0) {
    decide_with_simulation(report, path, family, per_sample_reps,
                           derive_seed(gen_seed, {0x7076616Cull}), sizes, 1);
  } else if (scenario.d >= 3) {
    throw InfeasibleError(
        "dimension >= 3 requires a per-sample limit-simulation budget (per_sample_replications)");
  } else {
    throw InfeasibleError("no critical source: provide a critical table or per-sample replications");
  }

  ReplicationOutcome out;
  out.ks_reject.reserve(sizes.size());
  out.cm_reject.reserve(sizes.size());
  for (const SizeDecision& d : report.decisions) {
    out.ks_reject.push_back(d.reject_ks);
    out.cm_reject.push_back(d.reject_cm);
  }
  if (report.p_values) {
    out.p_ks = report.p_values->first;
    out.p_cm = report.p_values->second;
  }
  return out;
}

}  // namespace

double mc_standard_error(double frequency, int replications) {
  if (replications < 1) return 0.0;
  return std::sqrt(frequency * (1.0 - frequency) / static_cast<double>(replications));
}

PowerTable run(const ExperimentPlan& plan) {
  if (plan.replications < 1) throw std::invalid_argument("experiment plan: replications must be >= 1");
  if (plan.scenarios.empty()) throw std::invalid_argument("experiment plan: no scenarios");
  if (plan.block_lengths.empty() || plan.exceedance_counts.empty())
    throw std::invalid_argument("experiment plan: empty (b, k) grid");
  for (const Scenario& s : plan.scenarios) {
    s.validate();
    if (s.d >= 3 && plan.per_sample_replications <= 0)
      throw InfeasibleError("experiment plan: scenario '" + s.id +
                            "' has dimension >= 3; set per_sample_replications");
  }

  struct Cell {
    std::size_t scenario_idx;
    int b;
    int k;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < plan.scenarios.size(); ++s)
    for (int b : plan.block_lengths)
      for (int k : plan.exceedance_counts) cells.push_back(Cell{s, b, k});

  const std::size_t R = static_cast<std::size_t>(plan.replications);
  const std::size_t n_tasks = cells.size() * R;
  // One outcome and one error slot per (cell, replication); workers never
  // share slots, and the reduction below scans in task order, so the table is
  // identical for any thread count.
  std::vector<ReplicationOutcome> outcomes(n_tasks);
  std::vector<std::string> errors(n_tasks);

  parallel_for(n_tasks, plan.threads, [&](std::size_t task) {
    const std::size_t c = task / R;
    const std::size_t r = task % R;
    const Cell& cell = cells[c];
    const Scenario& scenario = plan.scenarios[cell.scenario_idx];
    const std::uint64_t gen_seed =
        derive_seed(plan.seed, {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(r)});
    try {
      outcomes[task] = run_replication(scenario, cell.b, cell.k, plan.norm, plan.candidate_cap,
                                       plan.sizes, plan.table, plan.per_sample_replications,
                                       gen_seed);
    } catch (const InfeasibleError& e) {
      errors[task] = e.what();
    }
  });

  PowerTable result;
  result.sizes = plan.sizes;
  result.seed = plan.seed;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    CellResult cr;
    cr.scenario_id = plan.scenarios[cell.scenario_idx].id;
    cr.parameter = plan.scenarios[cell.scenario_idx].parameter;
    cr.b = cell.b;
    cr.k = cell.k;
    cr.replications = plan.replications;
    cr.seed = plan.seed;
    cr.ks_rejections.assign(plan.sizes.size(), 0);
    cr.cm_rejections.assign(plan.sizes.size(), 0);
    for (std::size_t r = 0; r < R && cr.infeasible.empty(); ++r)
      if (!errors[c * R + r].empty()) cr.infeasible = errors[c * R + r];
    if (cr.infeasible.empty()) {
      for (std::size_t r = 0; r < R; ++r) {
        const ReplicationOutcome& out = outcomes[c * R + r];
        for (std::size_t s = 0; s < plan.sizes.size(); ++s) {
          if (out.ks_reject[s]) ++cr.ks_rejections[s];
          if (out.cm_reject[s]) ++cr.cm_rejections[s];
        }
      }
    }
    result.cells.push_back(std::move(cr));
  }
  return result;
}

PValueSample p_value_quantiles(const Scenario& scenario, int b, int k, int replications,
                               std::uint64_t seed, int per_sample_replications,
                               std::size_t candidate_cap, Norm norm, int threads) {
  if (replications < 0) throw std::invalid_argument("p_value_quantiles: negative replications");
  if (per_sample_replications < 1)
    throw InfeasibleError("p_value_quantiles: per-sample limit-simulation budget required");
  scenario.validate();
  PValueSample sample;
  if (replications == 0) return sample;
  sample.ks.resize(static_cast<std::size_t>(replications));
  sample.cm.resize(static_cast<std::size_t>(replications));
  parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
    const std::uint64_t gen_seed = derive_seed(seed, {0ull, static_cast<std::uint64_t>(r)});
    const ReplicationOutcome out =
        run_replication(scenario, b, k, norm, candidate_cap, {}, std::nullopt,
                        per_sample_replications, gen_seed);
    sample.ks[r] = out.p_ks;
    sample.cm[r] = out.p_cm;
  });
  std::sort(sample.ks.begin(), sample.ks.end());
  std::sort(sample.cm.begin(), sample.cm.end());
  return sample;
}

}  // namespace specdep
