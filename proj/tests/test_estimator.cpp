#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "specdep/errors.hpp"
#include "specdep/estimator.hpp"
#include "specdep/rng.hpp"

using namespace specdep;

namespace {

TimedObservation obs(double x1, double x2, double t = 0.0) {
  Eigen::VectorXd x(2);
  x << x1, x2;
  return TimedObservation{t, x};
}

Block block_of(std::vector<TimedObservation> sample, int index = 1) {
  Block b;
  b.index = index;
  b.points = decompose(sample);
  return b;
}

// Sample whose block j consists of b points with a common angle and distinct
// radii; convenient for exact-value checks.
std::vector<TimedObservation> two_regime_sample(int n, double theta1_first, double theta1_second) {
  std::vector<TimedObservation> sample;
  for (int i = 0; i < n; ++i) {
    const double theta1 = i < n / 2 ? theta1_first : theta1_second;
    const double r = 1.0 + 0.01 * i;
    sample.push_back(obs(r * theta1, r * std::sqrt(1.0 - theta1 * theta1)));
  }
  return sample;
}

}  // namespace

TEST_CASE("local estimate: threshold, selection and measure") {
  const Block block =
      block_of({obs(3, 4), obs(6, 8), obs(1, 0), obs(0, 2), obs(5, 12)});  // radii 5,10,1,2,13
  const BlockEstimate est = local_estimate(block, 2);
  CHECK(est.threshold == 5.0);
  REQUIRE(est.selected.size() == 2);
  CHECK(est.selected[0].r == 13.0);
  CHECK(est.selected[1].r == 10.0);
  // A_{0.5}: angle (5/13, 12/13) is in, (0.6, 0.8) is out.
  const double m = est.measure([](const Eigen::VectorXd& theta) { return theta[0] <= 0.5; });
  CHECK(m == 0.5);
}

TEST_CASE("measure of the full sphere is one") {
  const Block block = block_of({obs(1, 2), obs(2, 3), obs(3, 4), obs(4, 5)});
  const BlockEstimate est = local_estimate(block, 2);
  CHECK(est.measure([](const Eigen::VectorXd&) { return true; }) == 1.0);
}

TEST_CASE("coinciding top angles give a point mass") {
  const Block block = block_of({obs(2, 2), obs(3, 3), obs(4, 4), obs(0.1, 0.2)});
  const BlockEstimate est = local_estimate(block, 2);
  const auto member = [](const Eigen::VectorXd& theta) { return theta[0] <= 0.8; };
  const double m = est.measure(member);
  CHECK((m == 0.0 || m == 1.0));
}

TEST_CASE("too few nonzero radii is infeasible") {
  const Block block = block_of({obs(0, 0), obs(0, 0), obs(1, 1), obs(2, 2)});
  CHECK_THROWS_MATCHES(local_estimate(block, 2), InfeasibleError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("insufficient exceedance candidates")));
}

TEST_CASE("zero-radius points are never selected") {
  const Block block = block_of({obs(0, 0), obs(1, 1), obs(2, 2), obs(3, 3)});
  const BlockEstimate est = local_estimate(block, 2);
  for (const AngularPoint& p : est.selected) CHECK(p.r > 0.0);
}

TEST_CASE("radius ties at the boundary resolve by original index") {
  const Block block = block_of({obs(3, 4), obs(4, 3), obs(0, 5), obs(1, 1)});  // radii 5,5,5,√2
  const BlockEstimate est = local_estimate(block, 2);
  REQUIRE(est.selected.size() == 2);
  CHECK(est.selected[0].index == 1);
  CHECK(est.selected[1].index == 2);
  CHECK(est.threshold == 5.0);
  CHECK(est.measure([](const Eigen::VectorXd&) { return true; }) == 1.0);
}

TEST_CASE("single-block path is linear in t") {
  const std::vector<TimedObservation> sample = two_regime_sample(8, 0.3, 0.3);
  const BlockScheme scheme(8, 8, 3);
  const Partition part = partition(scheme, decompose(sample));
  const SpectralPath path = integrated_path(scheme, {local_estimate(part.blocks[0], 3)});
  const auto member = [](const Eigen::VectorXd& theta) { return theta[0] <= 0.5; };
  for (double t : {0.1, 0.25, 0.5, 0.9, 1.0})
    CHECK(path.eval(t, member) == Catch::Approx(t * 1.0).margin(1e-15));
}

TEST_CASE("two-block path follows the piecewise formula") {
  // measure_1(A) = 1, measure_2(A) = 0 for A = {theta1 <= 0.5}.
  const std::vector<TimedObservation> sample = two_regime_sample(8, 0.2, 0.9);
  const BlockScheme scheme(8, 4, 2);
  const Partition part = partition(scheme, decompose(sample));
  std::vector<BlockEstimate> est;
  for (const Block& b : part.blocks) est.push_back(local_estimate(b, 2));
  const SpectralPath path = integrated_path(scheme, std::move(est));
  const auto member = [](const Eigen::VectorXd& theta) { return theta[0] <= 0.5; };
  CHECK(path.eval(0.5, member) == Catch::Approx(0.5).margin(1e-15));
  CHECK(path.eval(0.75, member) == Catch::Approx(0.5).margin(1e-15));
  CHECK(path.eval(1.0, member) == Catch::Approx(0.5).margin(1e-15));
  CHECK(path.eval(0.0, member) == 0.0);
  CHECK_THROWS_AS(path.eval(1.5, member), std::invalid_argument);
  CHECK_THROWS_AS(path.eval(-0.1, member), std::invalid_argument);
}

TEST_CASE("path of the full sphere reaches one") {
  RngStream rng(31);
  for (const int b : {5, 10}) {
    const int n = 20;
    std::vector<TimedObservation> sample;
    for (int i = 0; i < n; ++i) sample.push_back(obs(rng.uniform01() + 0.1, rng.uniform01() + 0.1));
    const BlockScheme scheme(n, b, 2);
    const Partition part = partition(scheme, decompose(sample));
    std::vector<BlockEstimate> est;
    for (const Block& blk : part.blocks) est.push_back(local_estimate(blk, 2));
    const SpectralPath path = integrated_path(scheme, std::move(est));
    CHECK(path.eval(1.0, [](const Eigen::VectorXd&) { return true; }) == 1.0);
  }
}

TEST_CASE("fixed-t estimate matches the block estimate at block centers") {
  RngStream rng(32);
  const int n = 24;
  std::vector<TimedObservation> sample;
  for (int i = 0; i < n; ++i) sample.push_back(obs(rng.uniform01() + 0.1, rng.uniform01() + 0.1));
  const BlockScheme scheme(n, 6, 2);
  const auto points = decompose(sample);
  const Partition part = partition(scheme, points);
  for (int j = 1; j <= scheme.block_count(); ++j) {
    const BlockEstimate direct = local_estimate(part.blocks[static_cast<std::size_t>(j - 1)], 2);
    const BlockEstimate windowed = estimate_at(scheme.center(j), points, scheme);
    CHECK(windowed.threshold == direct.threshold);
    REQUIRE(windowed.selected.size() == direct.selected.size());
    for (std::size_t i = 0; i < direct.selected.size(); ++i)
      CHECK(windowed.selected[i].index == direct.selected[i].index);
  }
}

TEST_CASE("fixed-t estimate straddling two blocks uses the window contents") {
  // n = 6, b = 2: h = 1/6. t = 0.5 -> i/6 in (1/3, 2/3] -> indices 3, 4.
  std::vector<TimedObservation> sample = {obs(1, 0), obs(2, 0), obs(3, 0),
                                          obs(4, 0), obs(5, 0), obs(6, 0)};
  const BlockScheme scheme(6, 2, 1);
  const BlockEstimate est = estimate_at(0.5, decompose(sample), scheme);
  CHECK(est.threshold == 3.0);
  REQUIRE(est.selected.size() == 1);
  CHECK(est.selected[0].index == 4);
}

TEST_CASE("order-statistic example with k=1") {
  std::vector<TimedObservation> sample = {obs(1, 0), obs(2, 0), obs(3, 0)};
  const BlockScheme scheme(3, 3, 1);
  const BlockEstimate est = estimate_at(scheme.center(1), decompose(sample), scheme);
  CHECK(est.threshold == 2.0);
  CHECK(est.selected[0].r == 3.0);
}

TEST_CASE("block-scale invariance: measures are bit-identical") {
  RngStream rng(33);
  const int n = 30;
  std::vector<TimedObservation> sample;
  for (int i = 0; i < n; ++i)
    sample.push_back(obs(rng.uniform01() + 0.05, rng.uniform01() + 0.05));
  const BlockScheme scheme(n, 10, 3);
  const double factors[3] = {2.5, 1e-3, 40.0};
  std::vector<TimedObservation> scaled = sample;
  for (int i = 0; i < n; ++i) scaled[static_cast<std::size_t>(i)].x *= factors[i / 10];

  // Each pipeline enumerates corners from its own atoms; scaling perturbs
  // angles by at most an ulp, leaving every membership count unchanged.
  const auto run = [&](const std::vector<TimedObservation>& s) {
    const Partition part = partition(scheme, decompose(s));
    std::vector<BlockEstimate> est;
    for (const Block& b : part.blocks) est.push_back(local_estimate(b, 3));
    SpectralPath path = integrated_path(scheme, std::move(est));
    std::vector<AngularPoint> atoms;
    for (const BlockEstimate& e : path.blocks())
      atoms.insert(atoms.end(), e.selected.begin(), e.selected.end());
    return MeasureTable(path, enumerate_candidate_sets(atoms, 2));
  };
  const MeasureTable t0 = run(sample);
  const MeasureTable t1 = run(scaled);
  CHECK(t0.block_measures() == t1.block_measures());
  CHECK(t0.totals() == t1.totals());
  for (const Block& blk : partition(scheme, decompose(sample)).blocks) {
    const BlockEstimate base_est = local_estimate(blk, 3);
    for (const AngularPoint& p : base_est.selected) CHECK(p.r > 0.0);
  }
}

TEST_CASE("within-block permutation invariance for distinct radii") {
  std::vector<TimedObservation> sample = {obs(1, 2), obs(5, 1), obs(2, 2), obs(3, 1)};
  std::vector<TimedObservation> permuted = {obs(3, 1), obs(1, 2), obs(5, 1), obs(2, 2)};
  const BlockScheme scheme(4, 4, 2);
  const auto measure_of = [&](const std::vector<TimedObservation>& s) {
    const Partition part = partition(scheme, decompose(s));
    return local_estimate(part.blocks[0], 2)
        .measure([](const Eigen::VectorXd& theta) { return theta[0] <= 0.9; });
  };
  CHECK(measure_of(sample) == measure_of(permuted));
}

TEST_CASE("block measures take values in multiples of 1/k and are monotone") {
  RngStream rng(34);
  const int n = 40;
  const int k = 4;
  std::vector<TimedObservation> sample;
  for (int i = 0; i < n; ++i) sample.push_back(obs(rng.uniform01() + 0.05, rng.uniform01() + 0.05));
  const BlockScheme scheme(n, 10, k);
  const Partition part = partition(scheme, decompose(sample));
  std::vector<BlockEstimate> est;
  for (const Block& b : part.blocks) est.push_back(local_estimate(b, k));
  const SpectralPath path = integrated_path(scheme, std::move(est));
  std::vector<AngularPoint> atoms;
  for (const BlockEstimate& e : path.blocks())
    atoms.insert(atoms.end(), e.selected.begin(), e.selected.end());
  const LowerSetFamily family = enumerate_candidate_sets(atoms, 2);
  const MeasureTable table(path, family);
  for (int j = 0; j < table.block_count(); ++j) {
    double prev = -1.0;
    for (std::size_t c = 0; c < family.corner_count(); ++c) {
      const double m = table.block_measures()(j, static_cast<Eigen::Index>(c));
      const double scaled_count = m * k;
      CHECK(std::abs(scaled_count - std::round(scaled_count)) < 1e-12);
      CHECK(m >= prev);  // monotone in the corner along the d=2 axis
      prev = m;
    }
    CHECK(table.block_measures()(j, static_cast<Eigen::Index>(family.corner_count() - 1)) == 1.0);
  }
}

TEST_CASE("measure table equals direct evaluation") {
  RngStream rng(35);
  const int n = 36;
  std::vector<TimedObservation> sample;
  for (int i = 0; i < n; ++i) sample.push_back(obs(rng.uniform01() + 0.05, rng.uniform01() + 0.05));
  const BlockScheme scheme(n, 9, 3);
  const Partition part = partition(scheme, decompose(sample));
  std::vector<BlockEstimate> est;
  for (const Block& b : part.blocks) est.push_back(local_estimate(b, 3));
  const SpectralPath path = integrated_path(scheme, std::move(est));
  std::vector<AngularPoint> atoms;
  for (const BlockEstimate& e : path.blocks())
    atoms.insert(atoms.end(), e.selected.begin(), e.selected.end());
  const LowerSetFamily family = enumerate_candidate_sets(atoms, 2);
  const MeasureTable table(path, family);
  for (std::size_t c = 0; c < family.corner_count(); ++c) {
    for (const auto mode : {CompareMode::closed, CompareMode::open}) {
      const std::size_t col = family.column(c, mode);
      for (int j = 1; j <= table.block_count(); ++j)
        CHECK(table.block_measures()(j - 1, static_cast<Eigen::Index>(col)) ==
              path.blocks()[static_cast<std::size_t>(j - 1)].measure(family, c, mode));
      CHECK(table.totals()(static_cast<Eigen::Index>(col)) ==
            Catch::Approx(path.eval(1.0, family, c, mode)).margin(1e-15));
    }
  }
}

TEST_CASE("atoms carry integrated masses summing to one") {
  RngStream rng(36);
  for (const int n : {20, 23}) {  // with and without truncation
    std::vector<TimedObservation> sample;
    for (int i = 0; i < n; ++i) sample.push_back(obs(rng.uniform01() + 0.1, rng.uniform01() + 0.1));
    const BlockScheme scheme(n, 5, 2);
    const Partition part = partition(scheme, decompose(sample));
    std::vector<BlockEstimate> est;
    for (const Block& b : part.blocks) est.push_back(local_estimate(b, 2));
    const SpectralPath path = integrated_path(scheme, std::move(est));
    const auto atoms = path.atoms();
    CHECK(atoms.size() == static_cast<std::size_t>(scheme.block_count() * scheme.k()));
    double total = 0.0;
    for (const auto& atom : atoms) total += atom.mass;
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
  }
}
