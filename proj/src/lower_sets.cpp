#include "specdep/lower_sets.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace specdep {

LowerSetFamily::LowerSetFamily(int dimension, std::vector<std::vector<double>> axes,
                               bool grid_fallback)
    : dimension_(dimension), axes_(std::move(axes)), grid_fallback_(grid_fallback) {
  if (dimension_ < 2) throw std::invalid_argument("lower set family: dimension must be >= 2");
  if (axes_.size() != static_cast<std::size_t>(dimension_ - 1))
    throw std::invalid_argument("lower set family: expected one axis per coordinate 1..d-1");
  for (auto& axis : axes_) {
    if (axis.empty()) throw std::invalid_argument("lower set family: empty axis");
    if (!std::is_sorted(axis.begin(), axis.end()))
      throw std::invalid_argument("lower set family: axis values must be sorted");
  }
  strides_.assign(axes_.size(), 1);
  corner_count_ = 1;
  // Last axis varies fastest.
  for (std::size_t a = axes_.size(); a-- > 0;) {
    strides_[a] = corner_count_;
    corner_count_ *= axes_[a].size();
  }
}

Eigen::VectorXd LowerSetFamily::corner(std::size_t flat) const {
  Eigen::VectorXd y(axis_count());
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const std::size_t idx = (flat / strides_[a]) % axes_[a].size();
    y[static_cast<Eigen::Index>(a)] = axes_[a][idx];
  }
  return y;
}

bool LowerSetFamily::contains(const Eigen::VectorXd& theta, std::size_t corner_flat,
                              CompareMode mode) const {
  const Eigen::VectorXd y = corner(corner_flat);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (mode == CompareMode::closed) {
      if (!(theta[i] <= y[i])) return false;
    } else {
      if (!(theta[i] < y[i])) return false;
    }
  }
  return true;
}

std::size_t LowerSetFamily::scatter_index(const Eigen::VectorXd& theta, CompareMode mode) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const auto& axis = axes_[a];
    const double v = theta[static_cast<Eigen::Index>(a)];
    std::size_t pos;
    if (mode == CompareMode::closed) {
      pos = static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), v) - axis.begin());
    } else {
      pos = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), v) - axis.begin());
    }
    if (pos == axis.size()) return npos;
    flat += pos * strides_[a];
  }
  return flat;
}

void LowerSetFamily::prefix_sum(double* data) const {
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const std::size_t len = axes_[a].size();
    if (len <= 1) continue;
    const std::size_t stride = strides_[a];
    const std::size_t block = stride * len;
    for (std::size_t base = 0; base < corner_count_; base += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        double* p = data + base + inner;
        for (std::size_t i = 1; i < len; ++i) p[i * stride] += p[(i - 1) * stride];
      }
    }
  }
}

LowerSetFamily enumerate_candidate_sets(const std::vector<AngularPoint>& exceedances,
                                        int dimension, std::size_t cap) {
  if (dimension < 2) throw std::invalid_argument("enumerate_candidate_sets: dimension must be >= 2");
  const int axes_n = dimension - 1;
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(axes_n));
  std::size_t product = 1;
  for (int a = 0; a < axes_n; ++a) {
    std::set<double> values{0.0, 1.0};
    for (const AngularPoint& p : exceedances) {
      if (!p.has_angle()) continue;
      if (p.theta.size() != dimension)
        throw std::invalid_argument("enumerate_candidate_sets: point dimension mismatch");
      values.insert(p.theta[a]);
    }
    axes[static_cast<std::size_t>(a)].assign(values.begin(), values.end());
    product *= values.size();
  }
  if (product > cap) {
    // Uniform per-axis grid; coarser but bounded.
    const std::size_t g = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(
               std::pow(static_cast<double>(cap), 1.0 / static_cast<double>(axes_n)) + 1e-9)));
    std::vector<double> grid(g);
    for (std::size_t i = 0; i < g; ++i)
      grid[i] = static_cast<double>(i) / static_cast<double>(g - 1);
    grid.back() = 1.0;
    for (auto& axis : axes) axis = grid;
    return LowerSetFamily(dimension, std::move(axes), true);
  }
  return LowerSetFamily(dimension, std::move(axes), false);
}

}  // namespace specdep
