#include "specdep/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specdep/errors.hpp"

namespace specdep {

Norm parse_norm(const std::string& name) {
  if (name == "euclidean" || name == "l2") return Norm::euclidean;
  if (name == "sum" || name == "l1") return Norm::sum;
  if (name == "max" || name == "linf") return Norm::max;
  throw std::invalid_argument("unknown norm '" + name + "' (expected euclidean, sum or max)");
}

std::string norm_name(Norm norm) {
  switch (norm) {
    case Norm::euclidean: return "euclidean";
    case Norm::sum: return "sum";
    case Norm::max: return "max";
  }
  return "euclidean";
}

double vector_norm(const Eigen::VectorXd& x, Norm norm) {
  switch (norm) {
    case Norm::euclidean: return x.norm();
    case Norm::sum: return x.cwiseAbs().sum();
    case Norm::max: return x.cwiseAbs().maxCoeff();
  }
  return x.norm();
}

BlockScheme::BlockScheme(int n, int b, int k) : n_(n), b_(b), k_(k) {
  if (n < 1) throw InfeasibleError("block scheme: sample size must be positive");
  if (b < 1) throw InfeasibleError("block scheme: block length must be positive");
  if (b > n) throw InfeasibleError("block scheme: fewer observations than one block (n=" +
                                   std::to_string(n) + ", b=" + std::to_string(b) + ")");
  if (k < 1) throw InfeasibleError("block scheme: exceedance count must be positive");
  if (k >= b)
    throw InfeasibleError("block scheme: exceedance count k=" + std::to_string(k) +
                          " must be smaller than block length b=" + std::to_string(b));
}

std::vector<AngularPoint> decompose(const std::vector<TimedObservation>& sample, Norm norm) {
  if (sample.empty()) throw std::invalid_argument("decompose: sample is empty");
  const Eigen::Index d = sample.front().x.size();
  if (d < 2) throw std::invalid_argument("decompose: observations must have dimension >= 2");
  std::vector<AngularPoint> out;
  out.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Eigen::VectorXd& x = sample[i].x;
    if (x.size() != d)
      throw std::invalid_argument("decompose: dimension mismatch at observation " +
                                  std::to_string(i + 1) + " (got " + std::to_string(x.size()) +
                                  ", expected " + std::to_string(d) + ")");
    AngularPoint p;
    p.index = static_cast<int>(i) + 1;
    p.r = vector_norm(x, norm);
    if (p.r > 0.0) p.theta = x / p.r;
    out.push_back(std::move(p));
  }
  return out;
}

Partition partition(const BlockScheme& scheme, const std::vector<AngularPoint>& points) {
  if (static_cast<int>(points.size()) != scheme.n())
    throw std::invalid_argument("partition: point count " + std::to_string(points.size()) +
                                " does not match scheme sample size " + std::to_string(scheme.n()));
  Partition part;
  part.truncated_count = scheme.truncated_count();
  const int J = scheme.block_count();
  const int b = scheme.b();
  part.blocks.reserve(static_cast<std::size_t>(J));
  for (int j = 1; j <= J; ++j) {
    Block block;
    block.index = j;
    block.points.assign(points.begin() + static_cast<std::ptrdiff_t>(j - 1) * b,
                        points.begin() + static_cast<std::ptrdiff_t>(j) * b);
    part.blocks.push_back(std::move(block));
  }
  return part;
}

std::vector<AngularPoint> window_points(double t, const std::vector<AngularPoint>& points,
                                        const BlockScheme& scheme) {
  const double h = scheme.bandwidth();
  const double n = static_cast<double>(scheme.n());
  const int lo = std::max(1, static_cast<int>(std::floor((t - h) * n)) - 1);
  const int hi = std::min(static_cast<int>(points.size()),
                          static_cast<int>(std::ceil((t + h) * n)) + 1);
  std::vector<AngularPoint> window;
  for (int i = lo; i <= hi; ++i) {
    const double ti = static_cast<double>(i) / n;
    if (ti > t - h && ti <= t + h) window.push_back(points[static_cast<std::size_t>(i - 1)]);
  }
  return window;
}

}  // namespace specdep
