// Fixed-bin histogram used by report JSON and the SVG renderings.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace critic {

struct Histogram {
  std::vector<double> edges;   // bins+1 ascending
  std::vector<long> counts;    // per bin

  long total() const {
    long t = 0;
    for (long c : counts) t += c;
    return t;
  }
};

inline Histogram make_histogram(const Eigen::VectorXd& values, int bins, double lo, double hi) {
  Histogram h;
  if (!(hi > lo)) hi = lo + 1.0;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b)
    h.edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / static_cast<double>(bins);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values(i);
    if (!std::isfinite(v)) continue;
    int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    h.counts[static_cast<std::size_t>(b)]++;
  }
  return h;
}

inline Histogram make_histogram(const std::vector<double>& values, int bins, double lo, double hi) {
  return make_histogram(
      Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())),
      bins, lo, hi);
}

}  // namespace critic
