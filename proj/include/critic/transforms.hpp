// Constrained-space transforms and the truncated-Normal density backing the
// group model: stick-breaking simplexes, logistic interval maps, and stable
// lower-truncated Normal log densities.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "critic/math.hpp"

namespace critic {

// v in (0,1)^{K-1} -> simplex of length K:
// pi_k = v_k * prod_{j<k} (1 - v_j), last entry takes the remainder product.
inline Eigen::VectorXd stick_breaking(const Eigen::VectorXd& v) {
  const Eigen::Index K = v.size() + 1;
  Eigen::VectorXd pi(K);
  double remaining = 1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!(v(k) > 0.0 && v(k) < 1.0))
      throw std::invalid_argument("stick_breaking: fractions must lie strictly in (0,1)");
    pi(k) = v(k) * remaining;
    remaining *= 1.0 - v(k);
  }
  pi(K - 1) = remaining;
  return pi;
}

inline Eigen::VectorXd stick_breaking_inverse(const Eigen::VectorXd& pi) {
  if (pi.size() < 2) throw std::invalid_argument("stick_breaking_inverse: need K >= 2");
  Eigen::VectorXd v(pi.size() - 1);
  double remaining = 1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    v(k) = pi(k) / remaining;
    remaining -= pi(k);
  }
  return v;
}

struct BoundedValue {
  double value;
  double log_jacobian;
};

// lo + (hi - lo) * logistic(x); log-Jacobian of the map x -> value.
inline BoundedValue transform_bounded(double x, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("transform_bounded: lo must be < hi");
  const double s = logistic(x);
  BoundedValue out;
  out.value = lo + (hi - lo) * s;
  out.log_jacobian = std::log(hi - lo) + log_logistic(x) + log_logistic(-x);
  return out;
}

inline double transform_bounded_inverse(double value, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("transform_bounded: lo must be < hi");
  return logit((value - lo) / (hi - lo));
}

// log N_+(y | mu, sigma^2), truncated below at zero. Returns -inf off support.
inline double log_truncated_normal(double y, double mu, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("log_truncated_normal: sigma must be > 0");
  if (!(y > 0.0)) return kNegInf;
  const double z = (y - mu) / sigma;
  return log_std_normal_pdf(z) - std::log(sigma) - log_std_normal_cdf(mu / sigma);
}

// Partials of log N_+ w.r.t. mu and sigma (needed by the hand-derived
// group-model gradient). h = phi/Phi evaluated at mu/sigma.
struct TruncNormalGrad {
  double d_mu;
  double d_sigma;
};

inline TruncNormalGrad log_truncated_normal_grad(double y, double mu, double sigma) {
  const double z = (y - mu) / sigma;
  const double h = std_normal_hazard(mu / sigma);
  TruncNormalGrad g;
  g.d_mu = z / sigma - h / sigma;
  g.d_sigma = (z * z - 1.0) / sigma + h * mu / (sigma * sigma);
  return g;
}

}  // namespace critic
