#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracle.hpp"
#include "specdep/rng.hpp"
#include "specdep/stat_tests.hpp"

using namespace specdep;

namespace {

TimedObservation obs(double x1, double x2) {
  Eigen::VectorXd x(2);
  x << x1, x2;
  return TimedObservation{0.0, x};
}

struct Pipeline {
  SpectralPath path;
  LowerSetFamily family;
  MeasureTable table;
};

Pipeline run_pipeline(const std::vector<TimedObservation>& sample, int b, int k) {
  const BlockScheme scheme(static_cast<int>(sample.size()), b, k);
  const Partition part = partition(scheme, decompose(sample));
  std::vector<BlockEstimate> est;
  for (const Block& block : part.blocks) est.push_back(local_estimate(block, k));
  SpectralPath path = integrated_path(scheme, std::move(est));
  std::vector<AngularPoint> atoms;
  for (const BlockEstimate& e : path.blocks())
    atoms.insert(atoms.end(), e.selected.begin(), e.selected.end());
  LowerSetFamily family = enumerate_candidate_sets(atoms, 2);
  MeasureTable table(path, family);
  return Pipeline{std::move(path), std::move(family), std::move(table)};
}

// First half at angle theta0, second half at theta1, distinct radii.
std::vector<TimedObservation> two_regime_sample(int n, double theta0, double theta1) {
  std::vector<TimedObservation> sample;
  for (int i = 0; i < n; ++i) {
    const double theta = i < n / 2 ? theta0 : theta1;
    const double r = 1.0 + 0.01 * i;
    sample.push_back(obs(r * theta, r * std::sqrt(1.0 - theta * theta)));
  }
  return sample;
}

}  // namespace

TEST_CASE("single block yields exactly zero statistics") {
  RngStream rng(7);
  std::vector<TimedObservation> sample;
  for (int i = 0; i < 16; ++i) sample.push_back(obs(rng.uniform01() + 0.1, rng.uniform01() + 0.1));
  const Pipeline pipe = run_pipeline(sample, 16, 3);
  CHECK(ks_statistic(pipe.table).value == 0.0);
  CHECK(cm_statistic(pipe.table).value == 0.0);
}

TEST_CASE("two-block closed forms: T_KS = 0.5 and T_CM = 1/12") {
  // J = 2, k = 2, h = 1/4; the maximizing corner separates the regimes, so
  // measure_1 = 1, measure_2 = 0 and D(t) rises to 1/4 at t = 1/2.
  const Pipeline pipe = run_pipeline(two_regime_sample(8, 0.2, 0.9), 4, 2);
  const KsStatistic ks = ks_statistic(pipe.table);
  const CmStatistic cm = cm_statistic(pipe.table);
  CHECK(ks.value == Catch::Approx(0.5).margin(1e-14));
  CHECK(ks.argmax_t == Catch::Approx(0.5).margin(1e-14));
  CHECK(cm.value == Catch::Approx(1.0 / 12.0).margin(1e-14));
}

TEST_CASE("constant angles give exactly zero statistics") {
  // Power-of-two radii scale the direction vector exactly, so every
  // decomposed angle is the same double.
  std::vector<TimedObservation> sample;
  for (int i = 0; i < 60; ++i) {
    const double r = std::ldexp(1.0, (i % 7) - 3);
    sample.push_back(obs(r * 0.6, r * 0.8));
  }
  const Pipeline pipe = run_pipeline(sample, 10, 2);
  CHECK(ks_statistic(pipe.table).value == 0.0);
  CHECK(cm_statistic(pipe.table).value == 0.0);
}

TEST_CASE("statistics are invariant under block-wise rescaling, bit for bit") {
  RngStream rng(9);
  std::vector<TimedObservation> sample;
  for (int i = 0; i < 60; ++i) sample.push_back(obs(rng.uniform01() + 0.05, rng.uniform01() + 0.05));
  std::vector<TimedObservation> scaled = sample;
  const double factors[6] = {3.0, 0.001, 17.0, 0.5, 100.0, 2.25};
  for (int i = 0; i < 60; ++i) scaled[static_cast<std::size_t>(i)].x *= factors[i / 10];
  const Pipeline a = run_pipeline(sample, 10, 3);
  const Pipeline b = run_pipeline(scaled, 10, 3);
  CHECK(ks_statistic(a.table).value == ks_statistic(b.table).value);
  CHECK(cm_statistic(a.table).value == cm_statistic(b.table).value);
}

TEST_CASE("pure two-regime alternative: statistics increase strictly in k") {
  const std::vector<TimedObservation> sample = two_regime_sample(16, 0.2, 0.9);
  double prev_ks = 0.0;
  double prev_cm = 0.0;
  for (const int k : {1, 2, 3}) {
    const Pipeline pipe = run_pipeline(sample, 8, k);
    const double ks = ks_statistic(pipe.table).value;
    const double cm = cm_statistic(pipe.table).value;
    CHECK(ks > prev_ks);
    CHECK(cm > prev_cm);
    prev_ks = ks;
    prev_cm = cm;
  }
}

TEST_CASE("production statistics match the brute-force oracle") {
  RngStream rng(20240811);
  for (int trial = 0; trial < 8; ++trial) {
    const auto inst = specdep_oracle::make_oracle_instance(rng);
    const Pipeline pipe = run_pipeline(inst.sample, inst.b, inst.k);
    // Reduced t grid keeps this fast; the acceptance suite runs the full one.
    const auto oracle =
        specdep_oracle::brute_force_statistics(inst.sample, inst.b, inst.k, 10000, 100000);
    const double ks = ks_statistic(pipe.table).value;
    const double cm = cm_statistic(pipe.table).value;
    CHECK(std::abs(ks - oracle.t_ks) <= 1e-6 * std::max(1e-9, std::abs(oracle.t_ks)));
    CHECK(std::abs(cm - oracle.t_cm) <= 2e-4 * std::max(1e-9, std::abs(oracle.t_cm)));
  }
}

TEST_CASE("the sup over a dense t grid never exceeds the boundary sup") {
  RngStream rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto inst = specdep_oracle::make_oracle_instance(rng);
    const Pipeline pipe = run_pipeline(inst.sample, inst.b, inst.k);
    const double scale =
        std::sqrt(static_cast<double>(inst.k) / pipe.table.block_span());
    const double boundary_sup = ks_statistic(pipe.table).value / scale;
    for (std::size_t c = 0; c < pipe.family.corner_count(); ++c) {
      for (const auto mode : {CompareMode::closed, CompareMode::open}) {
        for (int g = 0; g <= 10000; g += 7) {
          const double t = static_cast<double>(g) / 10000.0;
          const double d = pipe.path.eval(t, pipe.family, c, mode) -
                           t * pipe.path.eval(1.0, pipe.family, c, mode);
          CHECK(std::abs(d) <= boundary_sup + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("exact integration matches a dense midpoint Riemann sum") {
  RngStream rng(22);
  for (int trial = 0; trial < 3; ++trial) {
    const auto inst = specdep_oracle::make_oracle_instance(rng);
    const Pipeline pipe = run_pipeline(inst.sample, inst.b, inst.k);
    const CmStatistic cm = cm_statistic(pipe.table);
    // Riemann-sum the argmax column only; the oracle covers the full sup.
    const std::size_t c = cm.argmax_corner;
    const CompareMode mode = cm.argmax_mode;
    const double total = pipe.path.eval(1.0, pipe.family, c, mode);
    double sum = 0.0;
    const int points = 1000000;
    for (int g = 1; g <= points; ++g) {
      const double t = (static_cast<double>(g) - 0.5) / points;
      const double d = pipe.path.eval(t, pipe.family, c, mode) - t * total;
      sum += d * d;
    }
    const double riemann = static_cast<double>(inst.k) / pipe.table.block_span() * sum / points;
    if (cm.value > 0.0)
      CHECK(std::abs(cm.value - riemann) <= 1e-9 * cm.value);
  }
}

TEST_CASE("decisions against a critical table use strict rejection") {
  CriticalTable table;
  table.sizes = {0.05};
  table.ks = {0.8135};
  table.cm = {0.1939};
  TestReport report;
  report.t_ks = 0.9;
  report.t_cm = 0.043;
  decide_with_table(report, table, {0.05});
  REQUIRE(report.decisions.size() == 1);
  CHECK(report.decisions[0].reject_ks);
  CHECK_FALSE(report.decisions[0].reject_cm);

  // A statistic exactly at the critical value accepts.
  report.t_ks = 0.8135;
  decide_with_table(report, table, {0.05});
  CHECK_FALSE(report.decisions[0].reject_ks);
}

TEST_CASE("zero statistics get p-value one under simulation") {
  std::vector<TimedObservation> sample;
  for (int i = 0; i < 20; ++i) {
    const double r = std::ldexp(1.0, i % 5);
    sample.push_back(obs(r * 0.6, r * 0.8));  // constant angle
  }
  const Pipeline pipe = run_pipeline(sample, 5, 2);
  TestReport report = make_report(pipe.table);
  REQUIRE(report.t_ks == 0.0);
  decide_with_simulation(report, pipe.path, pipe.family, 100, 99, {0.05});
  REQUIRE(report.p_values.has_value());
  CHECK(report.p_values->first == 1.0);
  CHECK(report.p_values->second == 1.0);
  CHECK_FALSE(report.decisions[0].reject_ks);
  CHECK_FALSE(report.decisions[0].reject_cm);
}
