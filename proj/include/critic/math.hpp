// Scalar special functions and log-space reductions shared by every module.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace critic {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

inline double logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

// log(1 + e^x) without overflow for large |x|.
inline double log1pexp(double x) {
  if (x > 33.0) return x;
  if (x > -37.0) return std::log1p(std::exp(x));
  return std::exp(x);
}

// log(sigmoid(x)) = -log(1 + e^-x)
inline double log_logistic(double x) { return -log1pexp(-x); }

template <typename Derived>
double log_sum_exp(const Eigen::MatrixBase<Derived>& v) {
  if (v.size() == 0) return kNegInf;
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a +inf/nan poisons the sum)
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v(i) - m);
  return m + std::log(s);
}

template <typename Derived>
double log_mean_exp(const Eigen::MatrixBase<Derived>& v) {
  if (v.size() == 0) return kNegInf;
  const double lse = log_sum_exp(v);
  return std::isfinite(lse) ? lse - std::log(static_cast<double>(v.size())) : lse;
}

// In-place softmax of a log-weight vector; returns the normalising log-sum-exp.
inline double softmax_in_place(Eigen::VectorXd& log_w) {
  const double lse = log_sum_exp(log_w);
  if (!std::isfinite(lse)) {
    log_w.setConstant(1.0 / static_cast<double>(log_w.size()));
    return lse;
  }
  log_w = (log_w.array() - lse).exp();
  return lse;
}

inline double log_std_normal_pdf(double z) { return -0.5 * (z * z + kLogTwoPi); }

// log Phi(z), accurate over the whole real line (asymptotic series in the far
// left tail where erfc underflows).
inline double log_std_normal_cdf(double z) {
  if (z > -35.0) {
    return std::log(0.5 * std::erfc(-z * M_SQRT1_2));
  }
  const double z2 = z * z;
  const double series =
      1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) + 105.0 / (z2 * z2 * z2 * z2);
  return log_std_normal_pdf(z) - std::log(-z) + std::log(series);
}

// Hazard phi(z)/Phi(z); needed by truncated-Normal gradients.
inline double std_normal_hazard(double z) {
  if (z > -35.0) {
    return std::exp(log_std_normal_pdf(z) - log_std_normal_cdf(z));
  }
  const double z2 = z * z;
  const double series =
      1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) + 105.0 / (z2 * z2 * z2 * z2);
  return -z / series;
}

// Wichura's AS241 (PPND16) inverse Normal CDF.
inline double inv_std_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return kNegInf;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("inv_std_normal_cdf: p outside [0,1]");
  }
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

inline double poisson_log_pmf(long long k, double rate) {
  if (k < 0) return kNegInf;
  if (rate <= 0.0) return k == 0 ? 0.0 : kNegInf;
  const double kd = static_cast<double>(k);
  return kd * std::log(rate) - rate - std::lgamma(kd + 1.0);
}

inline double bernoulli_log_pmf(double x, double p) {
  // x in {0,1}; p strictly interior gives finite values, boundary p handled.
  if (x > 0.5) return p > 0.0 ? std::log(p) : kNegInf;
  return p < 1.0 ? std::log1p(-p) : kNegInf;
}

}  // namespace critic
