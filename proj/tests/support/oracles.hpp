// Test-only oracles, independent of the library's evaluation paths:
// closed-form conjugate predictives, exhaustive enumeration for the
// seed-conditioned statistic, adaptive quadrature, and MC error helpers.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

#include "critic/lsm.hpp"

namespace oracle {

// --- adaptive Simpson quadrature ------------------------------------------

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fb, double fm, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m));
  const double frm = f(0.5 * (m + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, fm, flm, eps / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, fb, frm, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-10) {
  const double m = 0.5 * (a + b);
  return simpson_rec(f, a, b, f(a), f(b), f(m), eps, 44);
}

// --- Monte-Carlo error helpers ---------------------------------------------

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

inline McEstimate mc_estimate(const std::vector<double>& values) {
  McEstimate out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = n > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

// --- Beta-Bernoulli digit-model predictives --------------------------------

// Exact marginal predictive of the supervised Bernoulli mixture:
// p(x|D) = sum_k E[w_k] prod_d (a_kd/(a_kd+b_kd))^{x_d} (b_kd/(a_kd+b_kd))^{1-x_d}.
// Exact because both the weights and each pixel probability enter linearly.
inline double digit_exact_marginal(const Eigen::VectorXd& weight_dirichlet,
                                   const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   const Eigen::VectorXd& x) {
  const double gamma0 = weight_dirichlet.sum();
  double total = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    double term = weight_dirichlet(k) / gamma0;
    for (Eigen::Index d = 0; d < a.cols(); ++d) {
      const double p1 = a(k, d) / (a(k, d) + b(k, d));
      term *= x(d) > 0.5 ? p1 : 1.0 - p1;
    }
    total += term;
  }
  return total;
}

// Mixture density at fixed draw parameters (direct component enumeration).
inline double digit_mixture_density(const Eigen::VectorXd& w, const Eigen::MatrixXd& p,
                                    const Eigen::VectorXd& x) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < p.rows(); ++k) {
    double term = w(k);
    for (Eigen::Index d = 0; d < p.cols(); ++d)
      term *= x(d) > 0.5 ? p(k, d) : 1.0 - p(k, d);
    total += term;
  }
  return total;
}

// Exact conditional predictive given one posterior draw: enumerate the seed's
// component from its responsibilities, then use the closed-form augmented
// Beta-Bernoulli predictive for the touched component (all other components
// keep the draw's sampled parameters).
inline double digit_exact_conditional_given_draw(const critic::LsmDraw& draw,
                                                 const Eigen::VectorXd& x_seed,
                                                 const Eigen::VectorXd& x_rep) {
  const Eigen::Index K = draw.params.rows();
  const Eigen::Index D = draw.params.cols();
  Eigen::VectorXd resp(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    double lik = draw.weights(k);
    for (Eigen::Index d = 0; d < D; ++d)
      lik *= x_seed(d) > 0.5 ? draw.params(k, d) : 1.0 - draw.params(k, d);
    resp(k) = lik;
  }
  resp /= resp.sum();

  double total = 0.0;
  for (Eigen::Index c = 0; c < K; ++c) {
    // mixture density of x_rep with component c's parameters integrated out
    // of Beta(a + seed, b + 1 - seed)
    double mix = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      double term = draw.weights(k);
      for (Eigen::Index d = 0; d < D; ++d) {
        double p1;
        if (k == c) {
          const double a = draw.suff_a(k, d) + x_seed(d);
          const double b = draw.suff_b(k, d) + (1.0 - x_seed(d));
          p1 = a / (a + b);
        } else {
          p1 = draw.params(k, d);
        }
        term *= x_rep(d) > 0.5 ? p1 : 1.0 - p1;
      }
      mix += term;
    }
    total += resp(c) * mix;
  }
  return total;
}

}  // namespace oracle
