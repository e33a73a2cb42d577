#ifndef SPECDEP_SAMPLE_HPP
#define SPECDEP_SAMPLE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace specdep {

enum class Norm { euclidean, sum, max };

Norm parse_norm(const std::string& name);
std::string norm_name(Norm norm);

double vector_norm(const Eigen::VectorXd& x, Norm norm);

// One observation: a time stamp in [0,1] (equidistant i/n by default) and a
// d-dimensional value, d >= 2 and constant across a sample.
struct TimedObservation {
  double t = 0.0;
  Eigen::VectorXd x;
};

// Radius/angle decomposition of an observation. theta is empty when r == 0;
// such points keep their index slot but are never exceedance candidates.
struct AngularPoint {
  double r = 0.0;
  Eigen::VectorXd theta;
  int index = 0;  // 1-based position in the original sample

  bool has_angle() const { return theta.size() > 0; }
};

// Sample size n, block length b, exceedances k per block, with the derived
// quantities used everywhere downstream:
//   h = b/(2n), J = floor(n/b), block j covers indices (j-1)b+1 .. jb,
//   block centers r_j = (2j-1)h. Trailing n - Jb observations are truncated.
class BlockScheme {
 public:
  BlockScheme(int n, int b, int k);

  int n() const { return n_; }
  int b() const { return b_; }
  int k() const { return k_; }
  double bandwidth() const { return static_cast<double>(b_) / (2.0 * n_); }      // h
  double block_span() const { return static_cast<double>(b_) / n_; }             // 2h
  int block_count() const { return n_ / b_; }                                    // J
  int truncated_count() const { return n_ - block_count() * b_; }
  double center(int j) const { return (2.0 * j - 1.0) * bandwidth(); }           // r_j

 private:
  int n_;
  int b_;
  int k_;
};

struct Block {
  int index = 0;  // 1-based block number j
  std::vector<AngularPoint> points;
};

struct Partition {
  std::vector<Block> blocks;
  int truncated_count = 0;
};

// Radius/angle decomposition of a sample, preserving order. Throws on
// dimension mismatch; zero vectors get r = 0 and no angle.
std::vector<AngularPoint> decompose(const std::vector<TimedObservation>& sample,
                                    Norm norm = Norm::euclidean);

// Cuts the decomposed sample into J = floor(n/b) blocks of exactly b points.
// points.size() must equal scheme.n(); the trailing remainder is dropped and
// reported through Partition::truncated_count.
Partition partition(const BlockScheme& scheme, const std::vector<AngularPoint>& points);

// The window I_{n,t} = { i : i/n in (t-h, t+h] } for the fixed-t estimator.
std::vector<AngularPoint> window_points(double t, const std::vector<AngularPoint>& points,
                                        const BlockScheme& scheme);

}  // namespace specdep

#endif  // SPECDEP_SAMPLE_HPP
