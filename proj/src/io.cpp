#include "specdep/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "specdep/errors.hpp"

namespace specdep {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& context) {
  if (!j.is_object()) throw DataError(context + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end())
      throw DataError(context + ": unknown key '" + item.key() + "'");
  }
  for (const std::string& key : required) {
    if (!j.contains(key)) throw DataError(context + ": missing key '" + key + "'");
  }
}

double parse_cell(const std::string& cell, int line_no, int col_no) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  double value = 0.0;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw DataError("line " + std::to_string(line_no) + ", column " + std::to_string(col_no + 1) +
                    ": cannot parse '" + cell + "' as a number");
  return value;
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.push_back("");
  return cells;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::vector<TimedObservation> load_dataset(const DatasetSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw DataError("cannot open data file '" + spec.path + "'");

  std::vector<std::pair<double, Eigen::VectorXd>> rows;  // (time or NaN, values)
  std::string line;
  int line_no = 0;
  bool skipped_header = false;
  std::size_t expected_cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (spec.header && !skipped_header) {
      skipped_header = true;
      continue;
    }
    const std::vector<std::string> cells = split(line, spec.delimiter);
    if (expected_cols == 0) {
      expected_cols = cells.size();
    } else if (cells.size() != expected_cols) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected_cols) + " columns, found " +
                      std::to_string(cells.size()));
    }

    std::vector<int> value_cols = spec.value_columns;
    if (value_cols.empty()) {
      for (int c = 0; c < static_cast<int>(cells.size()); ++c)
        if (!spec.time_column || c != *spec.time_column) value_cols.push_back(c);
    }
    if (value_cols.size() < 2)
      throw DataError("need at least 2 value columns, got " + std::to_string(value_cols.size()));

    double t = std::numeric_limits<double>::quiet_NaN();
    if (spec.time_column) {
      if (*spec.time_column < 0 || *spec.time_column >= static_cast<int>(cells.size()))
        throw DataError("line " + std::to_string(line_no) + ": time column out of range");
      t = parse_cell(cells[static_cast<std::size_t>(*spec.time_column)], line_no,
                     *spec.time_column);
      if (t < 0.0 || t > 1.0)
        throw DataError("line " + std::to_string(line_no) + ": time " + format_double(t) +
                        " outside [0,1]");
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(value_cols.size()));
    for (std::size_t c = 0; c < value_cols.size(); ++c) {
      if (value_cols[c] < 0 || value_cols[c] >= static_cast<int>(cells.size()))
        throw DataError("line " + std::to_string(line_no) + ": value column " +
                        std::to_string(value_cols[c]) + " out of range");
      x[static_cast<Eigen::Index>(c)] =
          parse_cell(cells[static_cast<std::size_t>(value_cols[c])], line_no, value_cols[c]);
    }
    rows.emplace_back(t, std::move(x));
  }
  if (rows.empty()) throw DataError("data file '" + spec.path + "' holds no observations");

  // Filters run before any block partitioning.
  std::vector<std::pair<double, Eigen::VectorXd>> kept;
  for (auto& row : rows) {
    if (spec.min_total && row.second.sum() < *spec.min_total) continue;
    if (spec.min_each && !(row.second.minCoeff() > *spec.min_each)) continue;
    kept.push_back(std::move(row));
  }
  if (kept.empty()) throw DataError("all observations removed by filters");

  std::vector<TimedObservation> sample;
  sample.reserve(kept.size());
  const double n = static_cast<double>(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    TimedObservation obs;
    obs.t = std::isnan(kept[i].first) ? static_cast<double>(i + 1) / n : kept[i].first;
    obs.x = std::move(kept[i].second);
    sample.push_back(std::move(obs));
  }
  return sample;
}

void write_dataset(std::ostream& out, const std::vector<TimedObservation>& sample,
                   char delimiter, bool header) {
  if (sample.empty()) return;
  const Eigen::Index d = sample.front().x.size();
  if (header) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j > 0) out << delimiter;
      out << "x" << (j + 1);
    }
    out << "\n";
  }
  for (const TimedObservation& obs : sample) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j > 0) out << delimiter;
      out << format_double(obs.x[j]);
    }
    out << "\n";
  }
}

Scenario scenario_from_json(const json& j) {
  require_keys(j, {"id", "parameter", "n", "d", "copula", "margins"}, {"n", "d", "copula", "margins"},
               "scenario");
  Scenario s;
  s.id = j.value("id", std::string("scenario"));
  s.parameter = j.value("parameter", 0.0);
  s.n = j.at("n").get<int>();
  s.d = j.at("d").get<int>();

  const json& cop = j.at("copula");
  require_keys(cop, {"family", "nu", "path"}, {"family", "path"}, "scenario.copula");
  const std::string family = cop.at("family").get<std::string>();
  if (family == "gumbel") {
    s.copula = Scenario::Copula::gumbel;
    if (cop.contains("nu")) throw DataError("scenario.copula: 'nu' only applies to the t copula");
  } else if (family == "t") {
    s.copula = Scenario::Copula::t;
    s.nu = cop.value("nu", 2.0);
  } else {
    throw DataError("scenario.copula: unknown family '" + family + "'");
  }

  const json& path = cop.at("path");
  const std::string type = path.value("type", std::string());
  if (type == "constant") {
    require_keys(path, {"type", "value"}, {"type", "value"}, "scenario.copula.path");
    s.path = ParamPath::constant(path.at("value").get<double>());
  } else if (type == "linear") {
    require_keys(path, {"type", "from", "to"}, {"type", "from", "to"}, "scenario.copula.path");
    s.path = ParamPath::linear(path.at("from").get<double>(), path.at("to").get<double>());
  } else if (type == "jump") {
    require_keys(path, {"type", "from", "to", "at"}, {"type", "from", "to", "at"},
                 "scenario.copula.path");
    s.path = ParamPath::jump(path.at("from").get<double>(), path.at("to").get<double>(),
                             path.at("at").get<double>());
  } else if (type == "two_jumps") {
    require_keys(path, {"type", "outside", "inside", "interval"},
                 {"type", "outside", "inside", "interval"}, "scenario.copula.path");
    const json& iv = path.at("interval");
    if (!iv.is_array() || iv.size() != 2)
      throw DataError("scenario.copula.path.interval: expected [lo, hi]");
    s.path = ParamPath::two_jumps(path.at("outside").get<double>(), path.at("inside").get<double>(),
                                  iv[0].get<double>(), iv[1].get<double>());
  } else {
    throw DataError("scenario.copula.path: unknown type '" + type + "'");
  }

  const json& margins = j.at("margins");
  require_keys(margins, {"type", "alpha"}, {"type", "alpha"}, "scenario.margins");
  const std::string mtype = margins.at("type").get<std::string>();
  if (mtype == "frechet") {
    s.margins.kind = MarginSpec::Kind::frechet;
  } else if (mtype == "frechet_sine") {
    s.margins.kind = MarginSpec::Kind::frechet_sine;
  } else if (mtype == "frechet_different") {
    s.margins.kind = MarginSpec::Kind::frechet_different;
  } else {
    throw DataError("scenario.margins: unknown type '" + mtype + "'");
  }
  s.margins.alpha = margins.at("alpha").get<double>();

  try {
    s.validate();
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(std::string("scenario '") + s.id + "': " + e.what());
  }
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json path;
  switch (s.path.kind) {
    case ParamPath::Kind::constant:
      path = {{"type", "constant"}, {"value", s.path.c0}};
      break;
    case ParamPath::Kind::linear:
      path = {{"type", "linear"}, {"from", s.path.c0}, {"to", s.path.c1}};
      break;
    case ParamPath::Kind::jump:
      path = {{"type", "jump"}, {"from", s.path.c0}, {"to", s.path.c1}, {"at", s.path.t0}};
      break;
    case ParamPath::Kind::two_jumps:
      path = {{"type", "two_jumps"},
              {"outside", s.path.c0},
              {"inside", s.path.c1},
              {"interval", {s.path.lo, s.path.hi}}};
      break;
  }
  json cop = {{"family", s.copula == Scenario::Copula::gumbel ? "gumbel" : "t"}, {"path", path}};
  if (s.copula == Scenario::Copula::t) cop["nu"] = s.nu;
  const char* mtype = s.margins.kind == MarginSpec::Kind::frechet ? "frechet"
                      : s.margins.kind == MarginSpec::Kind::frechet_sine ? "frechet_sine"
                                                                         : "frechet_different";
  return json{{"id", s.id},       {"parameter", s.parameter},
              {"n", s.n},         {"d", s.d},
              {"copula", cop},    {"margins", {{"type", mtype}, {"alpha", s.margins.alpha}}}};
}

ExperimentPlan plan_from_json(const json& j) {
  require_keys(j,
               {"scenarios", "block_lengths", "exceedance_counts", "replications", "sizes", "seed",
                "norm", "candidate_cap", "critical_table", "per_sample_replications", "threads"},
               {"scenarios", "block_lengths", "exceedance_counts", "replications", "seed"}, "plan");
  ExperimentPlan plan;
  for (const json& sj : j.at("scenarios")) plan.scenarios.push_back(scenario_from_json(sj));
  plan.block_lengths = j.at("block_lengths").get<std::vector<int>>();
  plan.exceedance_counts = j.at("exceedance_counts").get<std::vector<int>>();
  plan.replications = j.at("replications").get<int>();
  if (j.contains("sizes")) plan.sizes = j.at("sizes").get<std::vector<double>>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("norm")) plan.norm = parse_norm(j.at("norm").get<std::string>());
  if (j.contains("candidate_cap")) plan.candidate_cap = j.at("candidate_cap").get<std::size_t>();
  if (j.contains("critical_table")) {
    const json& ct = j.at("critical_table");
    plan.table = ct.is_string() ? load_critical_table(ct.get<std::string>())
                                : critical_table_from_json(ct);
  }
  if (j.contains("per_sample_replications"))
    plan.per_sample_replications = j.at("per_sample_replications").get<int>();
  if (j.contains("threads")) plan.threads = j.at("threads").get<int>();
  return plan;
}

nlohmann::json critical_table_to_json(const CriticalTable& table) {
  return json{{"sizes", table.sizes},
              {"ks", table.ks},
              {"cm", table.cm},
              {"grid_step", table.grid_step},
              {"replications", table.replications},
              {"seed", table.seed}};
}

CriticalTable critical_table_from_json(const json& j) {
  require_keys(j, {"sizes", "ks", "cm", "grid_step", "replications", "seed"},
               {"sizes", "ks", "cm"}, "critical table");
  CriticalTable table;
  table.sizes = j.at("sizes").get<std::vector<double>>();
  table.ks = j.at("ks").get<std::vector<double>>();
  table.cm = j.at("cm").get<std::vector<double>>();
  if (table.ks.size() != table.sizes.size() || table.cm.size() != table.sizes.size())
    throw DataError("critical table: sizes, ks and cm must have equal length");
  table.grid_step = j.value("grid_step", 0.0);
  table.replications = j.value("replications", 0);
  table.seed = j.value("seed", std::uint64_t{0});
  return table;
}

void save_critical_table(const std::string& path, const CriticalTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write critical table to '" + path + "'");
  out << critical_table_to_json(table).dump(2) << "\n";
}

CriticalTable load_critical_table(const std::string& path) {
  return critical_table_from_json(read_json_file(path));
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError("cannot parse '" + path + "': " + e.what());
  }
  return j;
}

nlohmann::json report_to_json(const TestReport& report) {
  const auto corner_to_json = [](const Eigen::VectorXd& y) {
    std::vector<double> v(y.data(), y.data() + y.size());
    return json(v);
  };
  json j{{"t_ks", report.t_ks},
         {"t_cm", report.t_cm},
         {"argmax_ks",
          {{"t", report.argmax_ks_t},
           {"corner", corner_to_json(report.argmax_ks_corner)},
           {"mode", report.argmax_ks_mode == CompareMode::closed ? "closed" : "open"}}},
         {"argmax_cm",
          {{"corner", corner_to_json(report.argmax_cm_corner)},
           {"mode", report.argmax_cm_mode == CompareMode::closed ? "closed" : "open"}}}};
  if (report.p_values) {
    j["p_values"] = {{"ks", report.p_values->first}, {"cm", report.p_values->second}};
  }
  json decisions = json::array();
  for (const SizeDecision& d : report.decisions) {
    json dj{{"size", d.size},
            {"reject_ks", d.reject_ks},
            {"reject_cm", d.reject_cm}};
    if (!std::isnan(d.ks_critical)) dj["ks_critical"] = d.ks_critical;
    if (!std::isnan(d.cm_critical)) dj["cm_critical"] = d.cm_critical;
    decisions.push_back(dj);
  }
  j["decisions"] = decisions;
  return j;
}

void write_power_csv(std::ostream& out, const PowerTable& table) {
  const auto quoted = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      q += c;
      if (c == '"') q += '"';
    }
    q += '"';
    return q;
  };
  out << "scenario,b,k,test,size,rejections,R,frequency,mc_se,seed,note\n";
  for (const CellResult& cell : table.cells) {
    for (const char* test : {"ks", "cm"}) {
      for (std::size_t s = 0; s < table.sizes.size(); ++s) {
        out << cell.scenario_id << "," << cell.b << "," << cell.k << "," << test << ","
            << format_double(table.sizes[s]) << ",";
        if (!cell.infeasible.empty()) {
          out << ",,,," << cell.seed << "," << quoted(cell.infeasible) << "\n";
          continue;
        }
        const int rejections =
            test[0] == 'k' ? cell.ks_rejections[s] : cell.cm_rejections[s];
        const double freq = static_cast<double>(rejections) / cell.replications;
        out << rejections << "," << cell.replications << "," << format_double(freq) << ","
            << format_double(mc_standard_error(freq, cell.replications)) << "," << cell.seed
            << ",\n";
      }
    }
  }
}

nlohmann::json power_to_json(const PowerTable& table) {
  json cells = json::array();
  for (const CellResult& cell : table.cells) {
    json cj{{"scenario", cell.scenario_id}, {"parameter", cell.parameter},
            {"b", cell.b},                  {"k", cell.k},
            {"R", cell.replications},       {"seed", cell.seed}};
    if (!cell.infeasible.empty()) {
      cj["infeasible"] = cell.infeasible;
    } else {
      json per_size = json::array();
      for (std::size_t s = 0; s < table.sizes.size(); ++s) {
        per_size.push_back(json{{"size", table.sizes[s]},
                                {"ks_rejections", cell.ks_rejections[s]},
                                {"cm_rejections", cell.cm_rejections[s]},
                                {"ks_frequency", cell.frequency_ks(s)},
                                {"cm_frequency", cell.frequency_cm(s)},
                                {"ks_mc_se", mc_standard_error(cell.frequency_ks(s), cell.replications)},
                                {"cm_mc_se", mc_standard_error(cell.frequency_cm(s), cell.replications)}});
      }
      cj["results"] = per_size;
    }
    cells.push_back(cj);
  }
  return json{{"sizes", table.sizes}, {"seed", table.seed}, {"cells", cells}};
}

void write_power_curves_csv(std::ostream& out, const PowerTable& table) {
  out << "parameter,b,k,test,size,frequency\n";
  for (const CellResult& cell : table.cells) {
    if (!cell.infeasible.empty()) continue;
    for (const char* test : {"ks", "cm"}) {
      for (std::size_t s = 0; s < table.sizes.size(); ++s) {
        const double freq = test[0] == 'k' ? cell.frequency_ks(s) : cell.frequency_cm(s);
        out << format_double(cell.parameter) << "," << cell.b << "," << cell.k << "," << test
            << "," << format_double(table.sizes[s]) << "," << format_double(freq) << "\n";
      }
    }
  }
}

CdfCurve integrated_cdf_curve(const SpectralPath& path, const std::string& label) {
  std::map<double, double> mass_at;  // first coordinate -> total mass
  for (const SpectralPath::Atom& atom : path.atoms()) mass_at[atom.theta[0]] += atom.mass;
  CdfCurve curve;
  curve.label = label;
  if (mass_at.empty() || mass_at.begin()->first > 0.0) {
    curve.x.push_back(0.0);
    curve.y.push_back(0.0);
  }
  double cum = 0.0;
  for (const auto& [value, mass] : mass_at) {
    // Both sides of the jump, so the step renders exactly.
    curve.x.push_back(value);
    curve.y.push_back(cum);
    cum += mass;
    curve.x.push_back(value);
    curve.y.push_back(cum);
  }
  curve.x.push_back(1.0);
  curve.y.push_back(cum);
  return curve;
}

void write_cdf_curves_csv(std::ostream& out, const std::vector<CdfCurve>& curves) {
  out << "curve,x,y\n";
  for (const CdfCurve& curve : curves)
    for (std::size_t i = 0; i < curve.x.size(); ++i)
      out << curve.label << "," << format_double(curve.x[i]) << "," << format_double(curve.y[i])
          << "\n";
}

}  // namespace specdep
