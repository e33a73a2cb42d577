#ifndef SPECDEP_ESTIMATOR_HPP
#define SPECDEP_ESTIMATOR_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "specdep/lower_sets.hpp"
#include "specdep/sample.hpp"

namespace specdep {

// Local spectral estimate of one block: the threshold is the (k+1)th largest
// radius, selected are the k points of largest radius (ties at the boundary
// resolved in favor of the smaller original index, so exactly k are kept and
// measure(full sphere) = 1 exactly), and the measure of a set is the fraction
// of selected angles falling in it.
struct BlockEstimate {
  int block_index = 0;  // 1-based j; 0 for window estimates
  double threshold = 0.0;
  std::vector<AngularPoint> selected;  // size k, descending radius

  double measure(const std::function<bool(const Eigen::VectorXd&)>& member) const;
  double measure(const LowerSetFamily& family, std::size_t corner, CompareMode mode) const;
};

BlockEstimate local_estimate(const Block& block, int k);

// Fixed-t estimate over the window I_{n,t} = (t-h, t+h]; same contract as
// local_estimate applied to the window contents.
BlockEstimate estimate_at(double t, const std::vector<AngularPoint>& points,
                          const BlockScheme& scheme);

// The integrated estimate along t: piecewise linear, slope measure_j(A) on
// ((j-1)2h, j*2h], with the last block's measure extended past J*2h when the
// sample was truncated. eval(0, A) = 0 and eval(1, full sphere) = 1.
class SpectralPath {
 public:
  SpectralPath(BlockScheme scheme, std::vector<BlockEstimate> blocks);

  const BlockScheme& scheme() const { return scheme_; }
  const std::vector<BlockEstimate>& blocks() const { return blocks_; }

  double eval(double t, const std::function<bool(const Eigen::VectorXd&)>& member) const;
  double eval(double t, const LowerSetFamily& family, std::size_t corner, CompareMode mode) const;

  // Atoms of the integrated measure at t = 1: every selected exceedance with
  // its integrated mass (2h/k per point, the last block also absorbing the
  // truncation remainder). Masses sum to one; duplicates are not merged.
  struct Atom {
    Eigen::VectorXd theta;
    double mass = 0.0;
  };
  std::vector<Atom> atoms() const;

 private:
  double eval_generic(double t, const std::function<double(const BlockEstimate&)>& m) const;

  BlockScheme scheme_;
  std::vector<BlockEstimate> blocks_;
};

SpectralPath integrated_path(const BlockScheme& scheme, std::vector<BlockEstimate> blocks);

// Per-family precomputation: block measures for every candidate column
// (corner x mode), their running sums over blocks, and the t = 1 totals.
// After this, every (t, A) query used by the test statistics is O(1).
class MeasureTable {
 public:
  MeasureTable(const SpectralPath& path, LowerSetFamily family);

  const LowerSetFamily& family() const { return family_; }
  int block_count() const { return static_cast<int>(block_measures_.rows()); }
  int exceedances_per_block() const { return k_; }
  double block_span() const { return two_h_; }  // 2h
  double tail_span() const { return tail_; }    // 1 - 2hJ

  const Eigen::MatrixXd& block_measures() const { return block_measures_; }  // J x 2C
  const Eigen::MatrixXd& prefix() const { return prefix_; }                  // J x 2C
  const Eigen::RowVectorXd& totals() const { return totals_; }               // eval(1, col)

  // D(t_j, col) = eval(t_j, col) - t_j * eval(1, col) at the block boundary
  // t_j = j * 2h; the supremum over continuous t of |D| is attained there.
  double knot(int j, std::size_t col) const {
    if (j == 0) return 0.0;
    const double tj = two_h_ * static_cast<double>(j);
    return two_h_ * prefix_(j - 1, static_cast<Eigen::Index>(col)) -
           tj * totals_(static_cast<Eigen::Index>(col));
  }

 private:
  LowerSetFamily family_;
  Eigen::MatrixXd block_measures_;
  Eigen::MatrixXd prefix_;
  Eigen::RowVectorXd totals_;
  double two_h_ = 0.0;
  double tail_ = 0.0;
  int k_ = 0;
};

}  // namespace specdep

#endif  // SPECDEP_ESTIMATOR_HPP
