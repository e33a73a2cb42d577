// Command-line front end: estimate the integrated spectral measure of a
// delimited data file and test whether the extreme value dependence changes
// over time, simulate critical-value tables, generate synthetic samples, and
// run Monte Carlo power studies.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible parameters.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "specdep/errors.hpp"
#include "specdep/io.hpp"
#include "specdep/limit_sim.hpp"
#include "specdep/power_study.hpp"
#include "specdep/stat_tests.hpp"

namespace {

using namespace specdep;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write to '" + path + "'");
  return out;
}

struct TestOptions {
  DatasetSpec dataset;
  int b = 50;
  int k = 10;
  std::string norm = "euclidean";
  std::size_t candidate_cap = 10000;
  std::vector<double> sizes = {0.05, 0.10};
  std::string critical_table_path;
  int simulate_replications = 0;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string report_path;
  std::string curves_path;
  int split = 0;
};

struct PipelineResult {
  TestReport report;
  SpectralPath path;
  int truncated = 0;
};

PipelineResult run_pipeline(const std::vector<TimedObservation>& sample, int b, int k, Norm norm,
                            std::size_t cap) {
  const int n = static_cast<int>(sample.size());
  const BlockScheme scheme(n, b, k);
  const std::vector<AngularPoint> points = decompose(sample, norm);
  const Partition part = partition(scheme, points);
  std::vector<BlockEstimate> estimates;
  estimates.reserve(part.blocks.size());
  for (const Block& block : part.blocks) estimates.push_back(local_estimate(block, k));
  SpectralPath path = integrated_path(scheme, std::move(estimates));
  std::vector<AngularPoint> exceedances;
  for (const BlockEstimate& est : path.blocks())
    exceedances.insert(exceedances.end(), est.selected.begin(), est.selected.end());
  const LowerSetFamily family = enumerate_candidate_sets(exceedances, points.front().theta.size()
                                                                          ? static_cast<int>(points.front().theta.size())
                                                                          : static_cast<int>(sample.front().x.size()),
                                                         cap);
  const MeasureTable table(path, family);
  PipelineResult result{make_report(table), std::move(path), part.truncated_count};
  return result;
}

int cmd_test(const TestOptions& opt) {
  const std::vector<TimedObservation> sample = load_dataset(opt.dataset);
  const Norm norm = parse_norm(opt.norm);
  const int n = static_cast<int>(sample.size());
  const int d = static_cast<int>(sample.front().x.size());

  PipelineResult pipe = run_pipeline(sample, opt.b, opt.k, norm, opt.candidate_cap);
  if (pipe.truncated > 0)
    std::cerr << "warning: discarding " << pipe.truncated
              << " trailing observations beyond the last full block\n";

  TestReport& report = pipe.report;
  if (!opt.critical_table_path.empty()) {
    decide_with_table(report, load_critical_table(opt.critical_table_path), opt.sizes);
  } else if (opt.simulate_replications > 0) {
    std::vector<AngularPoint> exceedances;
    for (const BlockEstimate& est : pipe.path.blocks())
      exceedances.insert(exceedances.end(), est.selected.begin(), est.selected.end());
    const LowerSetFamily family = enumerate_candidate_sets(exceedances, d, opt.candidate_cap);
    decide_with_simulation(report, pipe.path, family, opt.simulate_replications, opt.seed,
                           opt.sizes, opt.threads);
  } else if (d >= 3) {
    throw InfeasibleError(
        "dimension >= 3 has no tabulated critical values; pass --simulate-pvalues R");
  }

  std::cout << "observations: " << n << "  dimension: " << d << "  blocks: "
            << pipe.path.blocks().size() << " x " << opt.b << "  k: " << opt.k << "\n";
  std::cout << "T_KS = " << format_double(report.t_ks) << "  (argmax t = "
            << format_double(report.argmax_ks_t) << ")\n";
  std::cout << "T_CM = " << format_double(report.t_cm) << "\n";
  if (report.p_values)
    std::cout << "p-values: KS " << format_double(report.p_values->first) << ", CM "
              << format_double(report.p_values->second) << "\n";
  for (const SizeDecision& dec : report.decisions) {
    std::cout << "size " << format_double(dec.size) << ": KS "
              << (dec.reject_ks ? "reject" : "accept") << ", CM "
              << (dec.reject_cm ? "reject" : "accept") << "\n";
  }

  if (!opt.report_path.empty()) {
    auto out = open_output(opt.report_path);
    nlohmann::json j = report_to_json(report);
    j["n"] = n;
    j["d"] = d;
    j["b"] = opt.b;
    j["k"] = opt.k;
    j["norm"] = norm_name(norm);
    j["truncated"] = pipe.truncated;
    out << j.dump(2) << "\n";
  }

  if (!opt.curves_path.empty()) {
    std::vector<CdfCurve> curves;
    if (opt.split > 0) {
      if (opt.split >= n) throw InfeasibleError("--split must be smaller than the sample size");
      std::vector<TimedObservation> first(sample.begin(), sample.begin() + opt.split);
      std::vector<TimedObservation> second(sample.begin() + opt.split, sample.end());
      for (std::size_t i = 0; i < first.size(); ++i)
        first[i].t = static_cast<double>(i + 1) / static_cast<double>(first.size());
      for (std::size_t i = 0; i < second.size(); ++i)
        second[i].t = static_cast<double>(i + 1) / static_cast<double>(second.size());
      curves.push_back(integrated_cdf_curve(
          run_pipeline(first, opt.b, opt.k, norm, opt.candidate_cap).path,
          "rows_1_" + std::to_string(opt.split)));
      curves.push_back(integrated_cdf_curve(
          run_pipeline(second, opt.b, opt.k, norm, opt.candidate_cap).path,
          "rows_" + std::to_string(opt.split + 1) + "_" + std::to_string(n)));
    } else {
      curves.push_back(integrated_cdf_curve(pipe.path, "all"));
    }
    auto out = open_output(opt.curves_path);
    write_cdf_curves_csv(out, curves);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation of integrated spectral measures and tests for a changing "
               "extreme value dependence structure"};
  app.require_subcommand(1);

  // --- test ---
  TestOptions test_opt;
  CLI::App* test = app.add_subcommand("test", "Run the stationarity tests on a data file");
  test->add_option("--data", test_opt.dataset.path, "Delimited data file")->required();
  std::string delimiter = ",";
  test->add_option("--delimiter", delimiter, "Field delimiter (default ',')");
  test->add_flag("--header", test_opt.dataset.header, "Skip a header line");
  test->add_option("--time-col", [&test_opt](const std::vector<std::string>& v) {
    test_opt.dataset.time_column = std::stoi(v.back());
    return true;
  }, "0-based time column (default: equidistant by row order)");
  test->add_option("--cols", test_opt.dataset.value_columns,
                   "0-based value columns (default: all)");
  double min_total = 0.0, min_each = 0.0;
  CLI::Option* ot = test->add_option("--min-total", min_total,
                                     "Keep rows whose component sum is at least this");
  CLI::Option* oe = test->add_option("--min-each", min_each,
                                     "Keep rows where every component exceeds this");
  test->add_option("--b", test_opt.b, "Block length")->required();
  test->add_option("--k", test_opt.k, "Exceedances per block")->required();
  test->add_option("--norm", test_opt.norm, "Norm: euclidean, sum or max");
  test->add_option("--candidate-cap", test_opt.candidate_cap,
                   "Cap on the candidate corner family");
  test->add_option("--sizes", test_opt.sizes, "Nominal sizes for decisions");
  test->add_option("--critical-table", test_opt.critical_table_path,
                   "Critical value table JSON (d=2)");
  test->add_option("--simulate-pvalues", test_opt.simulate_replications,
                   "Per-sample limit-simulation replications (required for d>=3)");
  test->add_option("--seed", test_opt.seed, "Seed for the per-sample simulation");
  test->add_option("--threads", test_opt.threads, "Worker threads (0 = hardware)");
  test->add_option("--report", test_opt.report_path, "Write the report as JSON");
  test->add_option("--curves", test_opt.curves_path,
                   "Write integrated-cdf curve data (x,y CSV)");
  test->add_option("--split", test_opt.split,
                   "With --curves: compare rows 1..N against the rest");

  // --- critval ---
  double cv_grid = 0.005;
  int cv_reps = 2000;
  std::vector<double> cv_sizes = {0.05, 0.10};
  std::uint64_t cv_seed = 1;
  int cv_threads = 0;
  std::string cv_out;
  CLI::App* critval = app.add_subcommand("critval",
                                         "Simulate Brownian-pillow critical values (d=2)");
  critval->add_option("--grid-step", cv_grid, "Pillow grid step (default 0.005)");
  critval->add_option("--reps", cv_reps, "Pillow replications (default 2000)");
  critval->add_option("--sizes", cv_sizes, "Nominal sizes");
  critval->add_option("--seed", cv_seed, "Seed");
  critval->add_option("--threads", cv_threads, "Worker threads (0 = hardware)");
  critval->add_option("--out", cv_out, "Cache the table as JSON")->required();

  // --- generate ---
  std::string gen_config;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  bool gen_header = false;
  CLI::App* generate_cmd = app.add_subcommand("generate", "Draw a synthetic sample from a scenario");
  generate_cmd->add_option("--config", gen_config, "Scenario JSON file")->required();
  generate_cmd->add_option("--seed", gen_seed, "Seed");
  generate_cmd->add_option("--out", gen_out, "Output data file")->required();
  generate_cmd->add_flag("--header", gen_header, "Write a header line");

  // --- power ---
  std::string power_config;
  std::string power_prefix;
  CLI::App* power = app.add_subcommand("power", "Run a Monte Carlo size/power study");
  power->add_option("--config", power_config, "Experiment plan JSON file")->required();
  power->add_option("--out-prefix", power_prefix, "Prefix for CSV/JSON outputs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*test) {
      if (delimiter.size() != 1) throw DataError("--delimiter must be a single character");
      test_opt.dataset.delimiter = delimiter[0];
      if (*ot) test_opt.dataset.min_total = min_total;
      if (*oe) test_opt.dataset.min_each = min_each;
      return cmd_test(test_opt);
    }
    if (*critval) {
      const CriticalTable table =
          pillow_critical_values(cv_grid, cv_reps, cv_sizes, cv_seed, cv_threads);
      save_critical_table(cv_out, table);
      for (std::size_t i = 0; i < table.sizes.size(); ++i)
        std::cout << "size " << format_double(table.sizes[i]) << ": KS "
                  << format_double(table.ks[i]) << ", CM " << format_double(table.cm[i]) << "\n";
      return 0;
    }
    if (*generate_cmd) {
      const Scenario scenario = scenario_from_json(read_json_file(gen_config));
      const std::vector<TimedObservation> sample = generate(scenario, gen_seed);
      auto out = open_output(gen_out);
      write_dataset(out, sample, ',', gen_header);
      return 0;
    }
    if (*power) {
      const ExperimentPlan plan = plan_from_json(read_json_file(power_config));
      const PowerTable table = run(plan);
      {
        auto out = open_output(power_prefix + "_power.csv");
        write_power_csv(out, table);
      }
      {
        auto out = open_output(power_prefix + "_power.json");
        out << power_to_json(table).dump(2) << "\n";
      }
      {
        auto out = open_output(power_prefix + "_curves.csv");
        write_power_curves_csv(out, table);
      }
      for (const CellResult& cell : table.cells)
        if (!cell.infeasible.empty())
          std::cerr << "infeasible cell (" << cell.scenario_id << ", b=" << cell.b
                    << ", k=" << cell.k << "): " << cell.infeasible << "\n";
      return 0;
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible parameters: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
