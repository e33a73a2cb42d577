#include "specdep/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specdep/errors.hpp"

namespace specdep {

namespace {

BlockEstimate estimate_from_points(const std::vector<AngularPoint>& points, int k,
                                   int block_index) {
  int nonzero = 0;
  for (const AngularPoint& p : points)
    if (p.r > 0.0) ++nonzero;
  if (nonzero < k + 1)
    throw InfeasibleError("insufficient exceedance candidates: need at least " +
                          std::to_string(k + 1) + " nonzero radii, found " +
                          std::to_string(nonzero));
  std::vector<const AngularPoint*> order;
  order.reserve(points.size());
  for (const AngularPoint& p : points) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](const AngularPoint* a, const AngularPoint* b) {
    if (a->r != b->r) return a->r > b->r;
    return a->index < b->index;
  });
  BlockEstimate est;
  est.block_index = block_index;
  est.threshold = order[static_cast<std::size_t>(k)]->r;
  est.selected.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) est.selected.push_back(*order[static_cast<std::size_t>(i)]);
  return est;
}

}  // namespace

double BlockEstimate::measure(const std::function<bool(const Eigen::VectorXd&)>& member) const {
  if (selected.empty()) return 0.0;
  int count = 0;
  for (const AngularPoint& p : selected)
    if (member(p.theta)) ++count;
  return static_cast<double>(count) / static_cast<double>(selected.size());
}

double BlockEstimate::measure(const LowerSetFamily& family, std::size_t corner,
                              CompareMode mode) const {
  if (selected.empty()) return 0.0;
  int count = 0;
  for (const AngularPoint& p : selected)
    if (family.contains(p.theta, corner, mode)) ++count;
  return static_cast<double>(count) / static_cast<double>(selected.size());
}

BlockEstimate local_estimate(const Block& block, int k) {
  if (k < 1) throw InfeasibleError("local estimate: k must be positive");
  if (static_cast<int>(block.points.size()) <= k)
    throw InfeasibleError("local estimate: block has " + std::to_string(block.points.size()) +
                          " points, need more than k=" + std::to_string(k));
  return estimate_from_points(block.points, k, block.index);
}

BlockEstimate estimate_at(double t, const std::vector<AngularPoint>& points,
                          const BlockScheme& scheme) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("estimate_at: t must lie in [0,1]");
  const std::vector<AngularPoint> window = window_points(t, points, scheme);
  if (static_cast<int>(window.size()) <= scheme.k())
    throw InfeasibleError("estimate_at: window around t=" + std::to_string(t) + " holds " +
                          std::to_string(window.size()) + " points, need more than k=" +
                          std::to_string(scheme.k()));
  return estimate_from_points(window, scheme.k(), 0);
}

SpectralPath::SpectralPath(BlockScheme scheme, std::vector<BlockEstimate> blocks)
    : scheme_(scheme), blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("spectral path: needs at least one block");
  if (static_cast<int>(blocks_.size()) != scheme_.block_count())
    throw std::invalid_argument("spectral path: expected " +
                                std::to_string(scheme_.block_count()) + " block estimates, got " +
                                std::to_string(blocks_.size()));
}

double SpectralPath::eval_generic(double t,
                                  const std::function<double(const BlockEstimate&)>& m) const {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("spectral path: t must lie in [0,1]");
  const double two_h = scheme_.block_span();
  const int J = static_cast<int>(blocks_.size());
  // Complete blocks below t, then the partial contribution of the running
  // block; block index past J reuses block J.
  int complete = static_cast<int>(std::floor(t / two_h));
  if (complete > J) complete = J;
  double value = 0.0;
  for (int j = 0; j < std::min(complete, J); ++j) value += m(blocks_[static_cast<std::size_t>(j)]);
  value *= two_h;
  const double rest = t - two_h * static_cast<double>(complete);
  if (rest > 0.0) {
    const int running = std::min(complete, J - 1);
    value += rest * m(blocks_[static_cast<std::size_t>(running)]);
  }
  return value;
}

double SpectralPath::eval(double t,
                          const std::function<bool(const Eigen::VectorXd&)>& member) const {
  return eval_generic(t, [&](const BlockEstimate& b) { return b.measure(member); });
}

double SpectralPath::eval(double t, const LowerSetFamily& family, std::size_t corner,
                          CompareMode mode) const {
  return eval_generic(t, [&](const BlockEstimate& b) { return b.measure(family, corner, mode); });
}

std::vector<SpectralPath::Atom> SpectralPath::atoms() const {
  const double two_h = scheme_.block_span();
  const int J = static_cast<int>(blocks_.size());
  const double tail = 1.0 - two_h * static_cast<double>(J);
  const double k = static_cast<double>(scheme_.k());
  std::vector<Atom> out;
  out.reserve(blocks_.size() * static_cast<std::size_t>(scheme_.k()));
  for (int j = 0; j < J; ++j) {
    const double weight = (j == J - 1) ? (two_h + tail) / k : two_h / k;
    for (const AngularPoint& p : blocks_[static_cast<std::size_t>(j)].selected)
      out.push_back(Atom{p.theta, weight});
  }
  return out;
}

SpectralPath integrated_path(const BlockScheme& scheme, std::vector<BlockEstimate> blocks) {
  return SpectralPath(scheme, std::move(blocks));
}

MeasureTable::MeasureTable(const SpectralPath& path, LowerSetFamily family_in)
    : family_(std::move(family_in)) {
  const LowerSetFamily& family = family_;
  const auto& blocks = path.blocks();
  const int J = static_cast<int>(blocks.size());
  const std::size_t C = family.corner_count();
  const std::size_t cols = family.column_count();
  two_h_ = path.scheme().block_span();
  tail_ = 1.0 - two_h_ * static_cast<double>(J);
  if (tail_ < 0.0) tail_ = 0.0;
  k_ = path.scheme().k();

  block_measures_.setZero(J, static_cast<Eigen::Index>(cols));
  std::vector<double> closed_buf(C), open_buf(C);
  for (int j = 0; j < J; ++j) {
    std::fill(closed_buf.begin(), closed_buf.end(), 0.0);
    std::fill(open_buf.begin(), open_buf.end(), 0.0);
    const auto& selected = blocks[static_cast<std::size_t>(j)].selected;
    for (const AngularPoint& p : selected) {
      const std::size_t ci = family.scatter_index(p.theta, CompareMode::closed);
      if (ci != LowerSetFamily::npos) closed_buf[ci] += 1.0;
      const std::size_t oi = family.scatter_index(p.theta, CompareMode::open);
      if (oi != LowerSetFamily::npos) open_buf[oi] += 1.0;
    }
    family.prefix_sum(closed_buf.data());
    family.prefix_sum(open_buf.data());
    const double k_count = static_cast<double>(selected.size());
    for (std::size_t c = 0; c < C; ++c) {
      block_measures_(j, static_cast<Eigen::Index>(c)) = closed_buf[c] / k_count;
      block_measures_(j, static_cast<Eigen::Index>(C + c)) = open_buf[c] / k_count;
    }
  }

  prefix_ = block_measures_;
  for (int j = 1; j < J; ++j) prefix_.row(j) += prefix_.row(j - 1);
  totals_ = two_h_ * prefix_.row(J - 1) + tail_ * block_measures_.row(J - 1);
}

}  // namespace specdep
