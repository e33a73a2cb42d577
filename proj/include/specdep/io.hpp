#ifndef SPECDEP_IO_HPP
#define SPECDEP_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specdep/estimator.hpp"
#include "specdep/power_study.hpp"

namespace specdep {

// Delimited text ingestion. Value columns default to every column (minus the
// time column); filters run before any block partitioning. Times default to
// equidistant i/n in row order.
struct DatasetSpec {
  std::string path;
  char delimiter = ',';
  bool header = false;
  std::optional<int> time_column;    // 0-based
  std::vector<int> value_columns;    // 0-based; empty = all remaining columns
  std::optional<double> min_total;   // keep rows with component sum >= threshold
  std::optional<double> min_each;    // keep rows where every component > threshold
};

std::vector<TimedObservation> load_dataset(const DatasetSpec& spec);

// Locale-independent shortest round-trip formatting; all emitted numbers use
// a dot decimal separator regardless of environment.
std::string format_double(double value);

void write_dataset(std::ostream& out, const std::vector<TimedObservation>& sample,
                   char delimiter = ',', bool header = false);

// Strict JSON parsing: unknown keys are rejected with their path.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
ExperimentPlan plan_from_json(const nlohmann::json& j);

nlohmann::json critical_table_to_json(const CriticalTable& table);
CriticalTable critical_table_from_json(const nlohmann::json& j);
void save_critical_table(const std::string& path, const CriticalTable& table);
CriticalTable load_critical_table(const std::string& path);

nlohmann::json report_to_json(const TestReport& report);

void write_power_csv(std::ostream& out, const PowerTable& table);
nlohmann::json power_to_json(const PowerTable& table);
// Power-curve rows keyed by (scenario parameter, b, k, test, size).
void write_power_curves_csv(std::ostream& out, const PowerTable& table);

// The distribution function x -> IS(1, {theta_1 <= x}) of the integrated
// measure projected on the first coordinate, as plot-ready step data.
struct CdfCurve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

CdfCurve integrated_cdf_curve(const SpectralPath& path, const std::string& label);
void write_cdf_curves_csv(std::ostream& out, const std::vector<CdfCurve>& curves);

nlohmann::json read_json_file(const std::string& path);

}  // namespace specdep

#endif  // SPECDEP_IO_HPP
