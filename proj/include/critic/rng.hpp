// Seeded RNG streams and the sampling helpers used across the toolkit.
// Streams derived from one master seed stay decorrelated and reproducible,
// so parallel workers can each own a stream id instead of sharing state.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>

#include "critic/math.hpp"

namespace critic {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_id,
                       std::uint64_t substream_id = 0) {
  std::uint64_t s = splitmix64(master_seed ^ splitmix64(stream_id));
  s = splitmix64(s ^ splitmix64(substream_id));
  return Rng(s);
}

inline double runif(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double rnorm(Rng& rng, double mean = 0.0, double sd = 1.0) {
  // fresh distribution per call: no hidden spare-value state
  return std::normal_distribution<double>(mean, sd)(rng);
}

inline double rgamma(Rng& rng, double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0) throw std::invalid_argument("rgamma: shape and rate must be > 0");
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

inline double rbeta(Rng& rng, double a, double b) {
  const double x = rgamma(rng, a, 1.0);
  const double y = rgamma(rng, b, 1.0);
  return x / (x + y);
}

inline long long rpoisson(Rng& rng, double rate) {
  return std::poisson_distribution<long long>(rate)(rng);
}

inline Eigen::VectorXd rdirichlet(Rng& rng, const Eigen::VectorXd& alpha) {
  Eigen::VectorXd g(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) g(i) = rgamma(rng, alpha(i), 1.0);
  const double s = g.sum();
  if (s <= 0.0) return Eigen::VectorXd::Constant(alpha.size(), 1.0 / static_cast<double>(alpha.size()));
  return g / s;
}

// Index sampled proportionally to non-negative weights (need not be normalised).
inline Eigen::Index rcategorical(Rng& rng, const Eigen::VectorXd& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) throw std::invalid_argument("rcategorical: weights sum to zero");
  double u = runif(rng) * total;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    u -= weights(i);
    if (u <= 0.0) return i;
  }
  return weights.size() - 1;
}

inline Eigen::Index rcategorical_log(Rng& rng, const Eigen::VectorXd& log_weights) {
  Eigen::VectorXd w = log_weights;
  softmax_in_place(w);
  return rcategorical(rng, w);
}

// Normal(mean, sd) truncated to (0, inf), sampled by inverse CDF so one
// uniform always yields one value.
inline double rtruncnormal_pos(Rng& rng, double mean, double sd) {
  const double u = runif(rng);
  const double zlo = -mean / sd;
  if (zlo < 5.0) {
    const double p_lo = 0.5 * std::erfc(-zlo * M_SQRT1_2);
    const double p = p_lo + u * (1.0 - p_lo);
    return mean + sd * inv_std_normal_cdf(p);
  }
  // deep truncation: work in the complementary tail to keep precision
  const double log_tail = log_std_normal_cdf(-zlo);
  const double q = std::exp(log_tail) * (1.0 - u);
  const double z = q > 0.0 ? -inv_std_normal_cdf(q) : zlo;
  return mean + sd * z;
}

}  // namespace critic
