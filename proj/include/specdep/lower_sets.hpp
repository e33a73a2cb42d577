#ifndef SPECDEP_LOWER_SETS_HPP
#define SPECDEP_LOWER_SETS_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <vector>

#include "specdep/sample.hpp"

namespace specdep {

// Membership mode for a corner y: closed is theta_i <= y_i for i < d, open is
// theta_i < y_i. Open corners at the atom coordinates capture the left limits
// of the (purely atomic) empirical measures, so the supremum over the
// continuum of corners is attained on the finite family.
enum class CompareMode { closed, open };

// The coordinate lower sets A_y = { theta : theta_i <= y_i, i < d }, held as
// a cross product of per-axis candidate values. The family is monotone in y
// and always contains the full sphere (corner (1,...,1), closed).
class LowerSetFamily {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  LowerSetFamily(int dimension, std::vector<std::vector<double>> axes, bool grid_fallback);

  int dimension() const { return dimension_; }
  int axis_count() const { return dimension_ - 1; }
  const std::vector<double>& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  bool grid_fallback() const { return grid_fallback_; }

  std::size_t corner_count() const { return corner_count_; }
  // Column layout for measure tables: [0, C) closed corners, [C, 2C) open.
  std::size_t column_count() const { return 2 * corner_count_; }
  std::size_t column(std::size_t corner, CompareMode mode) const {
    return mode == CompareMode::closed ? corner : corner_count_ + corner;
  }
  std::size_t column_corner(std::size_t col) const {
    return col < corner_count_ ? col : col - corner_count_;
  }
  CompareMode column_mode(std::size_t col) const {
    return col < corner_count_ ? CompareMode::closed : CompareMode::open;
  }
  std::size_t full_sphere_column() const { return corner_count_ - 1; }  // closed (1,...,1)

  Eigen::VectorXd corner(std::size_t flat) const;
  bool contains(const Eigen::VectorXd& theta, std::size_t corner_flat, CompareMode mode) const;

  // Flat index of the smallest corner containing theta; scattering a weight
  // there and taking the multi-axis prefix sum yields, for every corner, the
  // sum of weights over contained atoms. npos means "in no corner" (only
  // possible in open mode, when some coordinate equals the axis maximum).
  std::size_t scatter_index(const Eigen::VectorXd& theta, CompareMode mode) const;

  // In-place inclusive prefix sum over all axes of a corner-indexed array.
  void prefix_sum(double* data) const;

 private:
  int dimension_;
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;
  std::size_t corner_count_;
  bool grid_fallback_;
};

// Builds the candidate family from the selected exceedances over all blocks:
// per axis the distinct observed coordinate values plus {0, 1}. If the cross
// product would exceed cap, falls back to a uniform per-axis grid with
// floor(cap^(1/(d-1))) points. Empty input yields the trivial family.
LowerSetFamily enumerate_candidate_sets(const std::vector<AngularPoint>& exceedances,
                                        int dimension, std::size_t cap = 10000);

}  // namespace specdep

#endif  // SPECDEP_LOWER_SETS_HPP
