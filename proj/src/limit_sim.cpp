#include "specdep/limit_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specdep/errors.hpp"
#include "specdep/parallel.hpp"

namespace specdep {

Eigen::VectorXd simulate_bridge(const Eigen::VectorXd& grid, RngStream& rng) {
  const Eigen::Index G = grid.size();
  if (G < 2) throw std::invalid_argument("simulate_bridge: grid needs at least two points");
  if (grid[0] != 0.0 || grid[G - 1] != 1.0)
    throw std::invalid_argument("simulate_bridge: grid endpoints must be 0 and 1");
  for (Eigen::Index i = 1; i < G; ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("simulate_bridge: grid must be strictly increasing");
  Eigen::VectorXd walk(G);
  walk[0] = 0.0;
  for (Eigen::Index i = 1; i < G; ++i)
    walk[i] = walk[i - 1] + std::sqrt(grid[i] - grid[i - 1]) * rng.normal();
  const double w1 = walk[G - 1];
  Eigen::VectorXd bridge(G);
  for (Eigen::Index i = 0; i < G; ++i) bridge[i] = walk[i] - grid[i] * w1;
  bridge[0] = 0.0;
  bridge[G - 1] = 0.0;
  return bridge;
}

BridgePanel simulate_bridge_panel(const Eigen::VectorXd& grid, int replications,
                                  std::uint64_t seed, int threads) {
  if (replications < 1)
    throw std::invalid_argument("simulate_bridge_panel: replications must be positive");
  BridgePanel panel;
  panel.grid = grid;
  panel.draws.resize(replications, grid.size());
  parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
    RngStream rng = RngStream::substream(seed, {static_cast<std::uint64_t>(r)});
    panel.draws.row(static_cast<Eigen::Index>(r)) = simulate_bridge(grid, rng).transpose();
  });
  return panel;
}

PillowDraw simulate_pillow(double grid_step, RngStream& rng) {
  if (!(grid_step > 0.0 && grid_step <= 0.05))
    throw std::invalid_argument("simulate_pillow: grid_step must lie in (0, 0.05]");
  const Eigen::Index G = static_cast<Eigen::Index>(std::lround(1.0 / grid_step)) + 1;
  const double step = 1.0 / static_cast<double>(G - 1);

  // Brownian sheet: cumulative sums of N(0, step^2) cell increments; row and
  // column 0 stay zero.
  Eigen::MatrixXd sheet = Eigen::MatrixXd::Zero(G, G);
  for (Eigen::Index i = 1; i < G; ++i)
    for (Eigen::Index j = 1; j < G; ++j) sheet(i, j) = step * rng.normal();
  for (Eigen::Index i = 1; i < G; ++i)
    for (Eigen::Index j = 1; j < G; ++j) sheet(i, j) += sheet(i, j - 1);
  for (Eigen::Index i = 1; i < G; ++i) sheet.row(i) += sheet.row(i - 1);

  PillowDraw draw;
  draw.grid_s.resize(G);
  for (Eigen::Index i = 0; i < G; ++i) draw.grid_s[i] = static_cast<double>(i) * step;
  draw.grid_t = draw.grid_s;
  draw.values.resize(G, G);
  const double corner = sheet(G - 1, G - 1);
  for (Eigen::Index i = 0; i < G; ++i) {
    const double s = draw.grid_s[i];
    for (Eigen::Index j = 0; j < G; ++j) {
      const double t = draw.grid_t[j];
      draw.values(i, j) = sheet(i, j) - s * sheet(G - 1, j) - t * sheet(i, G - 1) + s * t * corner;
    }
  }
  // The transform vanishes on the boundary up to the arithmetic above; pin it.
  draw.values.row(0).setZero();
  draw.values.row(G - 1).setZero();
  draw.values.col(0).setZero();
  draw.values.col(G - 1).setZero();
  return draw;
}

double upper_quantile(const std::vector<double>& sorted_draws, double size) {
  const std::size_t R = sorted_draws.size();
  if (R == 0) throw std::invalid_argument("upper_quantile: no draws");
  if (!(size > 0.0 && size < 1.0))
    throw std::invalid_argument("upper_quantile: size must be in (0,1)");
  if (size * static_cast<double>(R) < 10.0)
    throw InfeasibleError("upper_quantile: " + std::to_string(R) +
                          " replications are too few for nominal size " + std::to_string(size) +
                          " (need size * replications >= 10)");
  std::size_t rank = static_cast<std::size_t>(std::ceil((1.0 - size) * static_cast<double>(R)));
  if (rank < 1) rank = 1;
  if (rank > R) rank = R;
  return sorted_draws[rank - 1];
}

double CriticalTable::ks_critical(double size) const {
  for (std::size_t i = 0; i < sizes.size(); ++i)
    if (std::fabs(sizes[i] - size) < 1e-12) return ks[i];
  throw std::invalid_argument("critical table has no entry for size " + std::to_string(size));
}

double CriticalTable::cm_critical(double size) const {
  for (std::size_t i = 0; i < sizes.size(); ++i)
    if (std::fabs(sizes[i] - size) < 1e-12) return cm[i];
  throw std::invalid_argument("critical table has no entry for size " + std::to_string(size));
}

CriticalTable pillow_critical_values(double grid_step, int replications,
                                     std::vector<double> sizes, std::uint64_t seed, int threads) {
  if (!(grid_step > 0.0 && grid_step <= 0.05))
    throw std::invalid_argument("pillow_critical_values: grid_step must lie in (0, 0.05]");
  if (replications < 500)
    throw std::invalid_argument("pillow_critical_values: need at least 500 replications");
  std::sort(sizes.begin(), sizes.end());
  for (double s : sizes)
    if (s * replications < 10.0)
      throw InfeasibleError("pillow_critical_values: " + std::to_string(replications) +
                            " replications are too few for nominal size " + std::to_string(s));

  std::vector<double> ks_draws(static_cast<std::size_t>(replications));
  std::vector<double> cm_draws(static_cast<std::size_t>(replications));
  parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
    RngStream rng = RngStream::substream(seed, {0x70696C6Cull, static_cast<std::uint64_t>(r)});
    const PillowDraw pillow = simulate_pillow(grid_step, rng);
    const Eigen::Index G = pillow.values.rows();
    const double step = pillow.grid_s[1] - pillow.grid_s[0];
    ks_draws[r] = pillow.values.cwiseAbs().maxCoeff();
    // Trapezoid in s of W^2 at fixed t, then sup over t; the boundary rows
    // are zero, so the 1/2 end weights drop out.
    double sup_integral = 0.0;
    for (Eigen::Index j = 0; j < G; ++j) {
      const double integral = pillow.values.col(j).squaredNorm() * step;
      if (integral > sup_integral) sup_integral = integral;
    }
    cm_draws[r] = sup_integral;
  });

  std::sort(ks_draws.begin(), ks_draws.end());
  std::sort(cm_draws.begin(), cm_draws.end());
  CriticalTable table;
  table.sizes = sizes;
  table.grid_step = grid_step;
  table.replications = replications;
  table.seed = seed;
  for (double s : sizes) {
    table.ks.push_back(upper_quantile(ks_draws, s));
    table.cm.push_back(upper_quantile(cm_draws, s));
  }
  return table;
}

LimitProcessSimulator::LimitProcessSimulator(const SpectralPath& path, LowerSetFamily family_in,
                                             int grid_refine)
    : family_(std::move(family_in)) {
  const LowerSetFamily& family = family_;
  if (grid_refine < 1) throw std::invalid_argument("limit simulator: grid_refine must be >= 1");
  const std::vector<SpectralPath::Atom> atoms = path.atoms();
  if (atoms.empty()) throw std::invalid_argument("limit simulator: empty atom list");
  const int J = static_cast<int>(path.blocks().size());
  const double two_h = path.scheme().block_span();

  const double step = two_h / static_cast<double>(grid_refine);
  std::vector<double> grid_values;
  for (int i = 0; i <= J * grid_refine; ++i) grid_values.push_back(step * static_cast<double>(i));
  if (grid_values.back() < 1.0) grid_values.push_back(1.0);
  grid_values.back() = 1.0;
  grid_.resize(static_cast<Eigen::Index>(grid_values.size()));
  for (Eigen::Index i = 0; i < grid_.size(); ++i)
    grid_[i] = grid_values[static_cast<std::size_t>(i)];

  const std::size_t C = family.corner_count();
  const std::size_t m = atoms.size();
  closed_idx_.resize(m);
  open_idx_.resize(m);
  sqrt_mass_.resize(m);
  std::vector<double> closed_mass(C, 0.0), open_mass(C, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    closed_idx_[l] = family.scatter_index(atoms[l].theta, CompareMode::closed);
    open_idx_[l] = family.scatter_index(atoms[l].theta, CompareMode::open);
    sqrt_mass_[l] = std::sqrt(atoms[l].mass);
    if (closed_idx_[l] != LowerSetFamily::npos) closed_mass[closed_idx_[l]] += atoms[l].mass;
    if (open_idx_[l] != LowerSetFamily::npos) open_mass[open_idx_[l]] += atoms[l].mass;
  }
  family.prefix_sum(closed_mass.data());
  family.prefix_sum(open_mass.data());
  // Normalizing by the accumulated total (mathematically one) makes the
  // full-sphere column mass exactly 1, so Z vanishes there identically.
  const double total = closed_mass[C - 1];
  column_mass_.resize(2 * C);
  for (std::size_t c = 0; c < C; ++c) {
    column_mass_[c] = closed_mass[c] / total;
    column_mass_[C + c] = open_mass[c] / total;
  }
}

Eigen::MatrixXd LimitProcessSimulator::draw(RngStream& rng) const {
  const Eigen::Index G = grid_.size();
  const std::size_t m = sqrt_mass_.size();
  const std::size_t C = column_mass_.size() / 2;
  Eigen::MatrixXd scaled(static_cast<Eigen::Index>(m), G);
  for (std::size_t l = 0; l < m; ++l)
    scaled.row(static_cast<Eigen::Index>(l)) = sqrt_mass_[l] * simulate_bridge(grid_, rng).transpose();

  Eigen::MatrixXd z(G, static_cast<Eigen::Index>(2 * C));
  std::vector<double> closed_sum(C), open_sum(C);
  for (Eigen::Index g = 0; g < G; ++g) {
    std::fill(closed_sum.begin(), closed_sum.end(), 0.0);
    std::fill(open_sum.begin(), open_sum.end(), 0.0);
    for (std::size_t l = 0; l < m; ++l) {
      const double v = scaled(static_cast<Eigen::Index>(l), g);
      if (closed_idx_[l] != LowerSetFamily::npos) closed_sum[closed_idx_[l]] += v;
      if (open_idx_[l] != LowerSetFamily::npos) open_sum[open_idx_[l]] += v;
    }
    family_.prefix_sum(closed_sum.data());
    family_.prefix_sum(open_sum.data());
    const double grand = closed_sum[C - 1];  // sum over all atoms
    for (std::size_t c = 0; c < C; ++c) {
      z(g, static_cast<Eigen::Index>(c)) = closed_sum[c] - column_mass_[c] * grand;
      z(g, static_cast<Eigen::Index>(C + c)) = open_sum[c] - column_mass_[C + c] * grand;
    }
  }
  return z;
}

std::pair<double, double> LimitProcessSimulator::draw_functionals(RngStream& rng) const {
  const Eigen::MatrixXd z = draw(rng);
  const Eigen::Index G = z.rows();
  double sup_abs = 0.0;
  double sup_integral = 0.0;
  for (Eigen::Index col = 0; col < z.cols(); ++col) {
    double integral = 0.0;
    for (Eigen::Index g = 0; g < G; ++g) {
      const double value = z(g, col);
      const double a = std::fabs(value);
      if (a > sup_abs) sup_abs = a;
      if (g > 0) {
        const double prev = z(g - 1, col);
        integral += (grid_[g] - grid_[g - 1]) * (prev * prev + prev * value + value * value) / 3.0;
      }
    }
    if (integral > sup_integral) sup_integral = integral;
  }
  return {sup_abs, sup_integral};
}

LimitSimResult estimated_limit_p_values(const SpectralPath& path, const LowerSetFamily& family,
                                        double t_ks, double t_cm, int replications,
                                        std::uint64_t seed, int threads, int grid_refine) {
  if (replications < 1)
    throw std::invalid_argument("estimated_limit_p_values: replications must be positive");
  const LimitProcessSimulator simulator(path, family, grid_refine);
  std::vector<double> ks_draws(static_cast<std::size_t>(replications));
  std::vector<double> cm_draws(static_cast<std::size_t>(replications));
  parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
    RngStream rng = RngStream::substream(seed, {0x6C696D69ull, static_cast<std::uint64_t>(r)});
    const auto [ks, cm] = simulator.draw_functionals(rng);
    ks_draws[r] = ks;
    cm_draws[r] = cm;
  });
  std::sort(ks_draws.begin(), ks_draws.end());
  std::sort(cm_draws.begin(), cm_draws.end());
  LimitSimResult result;
  result.ks_draws = std::move(ks_draws);
  result.cm_draws = std::move(cm_draws);
  const double R = static_cast<double>(replications);
  const auto count_geq = [](const std::vector<double>& sorted, double x) {
    return static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), x));
  };
  result.p_ks = (1.0 + count_geq(result.ks_draws, t_ks)) / (1.0 + R);
  result.p_cm = (1.0 + count_geq(result.cm_draws, t_cm)) / (1.0 + R);
  return result;
}

}  // namespace specdep
