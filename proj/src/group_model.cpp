#include "critic/group_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "critic/math.hpp"
#include "critic/transforms.hpp"

namespace critic {

using json = nlohmann::json;

GroupMixtureSpec make_group_spec(const MeasurementTable& table, int K, double alpha_dp) {
  if (table.rows.empty()) throw std::invalid_argument("make_group_spec: empty table");
  double y_max = 0.0;
  double y_min = std::numeric_limits<double>::infinity();
  for (const auto& r : table.rows) {
    y_max = std::max(y_max, r.y);
    y_min = std::min(y_min, r.y);
  }
  double range = y_max - y_min;
  if (range <= 0.0) range = std::max(1e-2 * std::max(1.0, y_max), 1e-6);

  GroupMixtureSpec spec;
  spec.K = K;
  spec.alpha_dp = alpha_dp;
  spec.mu_lo = 0.0;
  spec.mu_hi = 1.5 * y_max;
  spec.sigma_lo = 1e-3 * range;
  spec.sigma_hi = range;
  spec.num_groups = static_cast<int>(table.group_names.size());
  return spec;
}

Eigen::Index group_param_dim(const GroupMixtureSpec& spec) {
  return static_cast<Eigen::Index>(spec.num_groups) * (spec.K - 1) + 2 * spec.K;
}

namespace {

void check_spec(const GroupMixtureSpec& spec) {
  if (spec.K < 2) throw std::invalid_argument("group mixture: K must be >= 2");
  if (spec.num_groups < 1) throw std::invalid_argument("group mixture: need >= 1 group");
  if (!(spec.mu_lo < spec.mu_hi) || !(spec.sigma_lo < spec.sigma_hi) || spec.sigma_lo <= 0.0 ||
      spec.mu_lo < 0.0)
    throw std::invalid_argument("group mixture: bounds must be ordered (and positive for sigma)");
  if (spec.alpha_dp <= 0.0) throw std::invalid_argument("group mixture: alpha must be > 0");
}

}  // namespace

GroupMixtureDraw unpack_group_params(const Eigen::VectorXd& params,
                                     const GroupMixtureSpec& spec) {
  check_spec(spec);
  if (params.size() != group_param_dim(spec))
    throw std::invalid_argument("group mixture: parameter dimension mismatch");
  const int G = spec.num_groups;
  const int K = spec.K;
  GroupMixtureDraw draw;
  draw.pi.resize(G);
  for (int g = 0; g < G; ++g) {
    Eigen::VectorXd v(K - 1);
    for (int j = 0; j < K - 1; ++j) v(j) = logistic(params(g * (K - 1) + j));
    draw.pi[g] = stick_breaking(v);
  }
  draw.mu.resize(K);
  draw.sigma.resize(K);
  const Eigen::Index off_mu = static_cast<Eigen::Index>(G) * (K - 1);
  for (int k = 0; k < K; ++k) {
    draw.mu(k) = transform_bounded(params(off_mu + k), spec.mu_lo, spec.mu_hi).value;
    draw.sigma(k) = transform_bounded(params(off_mu + K + k), spec.sigma_lo, spec.sigma_hi).value;
  }
  return draw;
}

double group_mixture_logjoint(const Eigen::VectorXd& params, const MeasurementTable& table,
                              const GroupMixtureSpec& spec, Eigen::VectorXd& grad) {
  check_spec(spec);
  const Eigen::Index dim = group_param_dim(spec);
  if (params.size() != dim)
    throw std::invalid_argument("group_mixture_logjoint: parameter dimension mismatch");
  const int G = spec.num_groups;
  const int K = spec.K;
  grad.setZero(dim);

  double logp = 0.0;

  // sticks: Beta(1, alpha) prior plus logistic jacobian
  Eigen::MatrixXd v(G, K - 1);
  for (int g = 0; g < G; ++g)
    for (int j = 0; j < K - 1; ++j) {
      const Eigen::Index idx = g * (K - 1) + j;
      const double s = logistic(params(idx));
      v(g, j) = s;
      logp += std::log(spec.alpha_dp) + spec.alpha_dp * log_logistic(-params(idx)) +
              log_logistic(params(idx));
      grad(idx) += (1.0 - s) - spec.alpha_dp * s;
    }

  // uniform components within bounds: only the jacobian varies
  const Eigen::Index off_mu = static_cast<Eigen::Index>(G) * (K - 1);
  Eigen::VectorXd mu(K), sigma(K), dmu_dx(K), dsigma_dx(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::Index im = off_mu + k;
    const Eigen::Index is = off_mu + K + k;
    const double sm = logistic(params(im));
    const double ss = logistic(params(is));
    mu(k) = spec.mu_lo + (spec.mu_hi - spec.mu_lo) * sm;
    sigma(k) = spec.sigma_lo + (spec.sigma_hi - spec.sigma_lo) * ss;
    dmu_dx(k) = (spec.mu_hi - spec.mu_lo) * sm * (1.0 - sm);
    dsigma_dx(k) = (spec.sigma_hi - spec.sigma_lo) * ss * (1.0 - ss);
    logp += -std::log(spec.mu_hi - spec.mu_lo) + std::log(dmu_dx(k));
    logp += -std::log(spec.sigma_hi - spec.sigma_lo) + std::log(dsigma_dx(k));
    grad(im) += 1.0 - 2.0 * sm;
    grad(is) += 1.0 - 2.0 * ss;
  }

  if (table.rows.empty()) return logp;
  if (static_cast<int>(table.group_names.size()) > G)
    throw std::invalid_argument("group_mixture_logjoint: table has more groups than the spec");

  // per-component constants
  Eigen::VectorXd log_pi_flat(G * K);
  std::vector<Eigen::VectorXd> pis(G);
  for (int g = 0; g < G; ++g) {
    pis[g] = stick_breaking(v.row(g).transpose());
    for (int k = 0; k < K; ++k) log_pi_flat(g * K + k) = std::log(pis[g](k));
  }
  Eigen::VectorXd log_sigma(K), log_phi_norm(K), hazard(K);
  for (int k = 0; k < K; ++k) {
    log_sigma(k) = std::log(sigma(k));
    log_phi_norm(k) = log_std_normal_cdf(mu(k) / sigma(k));
    hazard(k) = std_normal_hazard(mu(k) / sigma(k));
  }

  Eigen::MatrixXd resp_sums = Eigen::MatrixXd::Zero(G, K);
  Eigen::VectorXd grad_mu = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd grad_sigma = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd a(K), rho(K);

  for (const MeasurementRow& row : table.rows) {
    const int g = row.group;
    const double y = row.y;
    for (int k = 0; k < K; ++k) {
      const double z = (y - mu(k)) / sigma(k);
      a(k) = y > 0.0
                 ? log_pi_flat(g * K + k) - 0.5 * (z * z + kLogTwoPi) - log_sigma(k) - log_phi_norm(k)
                 : kNegInf;
    }
    const double l = log_sum_exp(a);
    logp += l;
    if (!std::isfinite(l)) continue;
    for (int k = 0; k < K; ++k) {
      const double r = std::exp(a(k) - l);
      rho(k) = r;
      resp_sums(g, k) += r;
      const double z = (y - mu(k)) / sigma(k);
      grad_mu(k) += r * (z / sigma(k) - hazard(k) / sigma(k));
      grad_sigma(k) += r * ((z * z - 1.0) / sigma(k) + hazard(k) * mu(k) / (sigma(k) * sigma(k)));
    }
  }

  for (int k = 0; k < K; ++k) {
    grad(off_mu + k) += grad_mu(k) * dmu_dx(k);
    grad(off_mu + K + k) += grad_sigma(k) * dsigma_dx(k);
  }
  // chain responsibilities through the stick-breaking map
  for (int g = 0; g < G; ++g) {
    double suffix = resp_sums(g, K - 1);
    for (int j = K - 2; j >= 0; --j) {
      const Eigen::Index idx = g * (K - 1) + j;
      // d/dv_j = R_j / v_j - suffix / (1 - v_j); times dv/dx = v(1-v)
      grad(idx) += resp_sums(g, j) * (1.0 - v(g, j)) - suffix * v(g, j);
      suffix += resp_sums(g, j);
    }
  }
  return logp;
}

TargetDensity group_mixture_target(const MeasurementTable& table, const GroupMixtureSpec& spec) {
  TargetDensity target;
  target.dim = group_param_dim(spec);
  target.logp_and_grad = [table, spec](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    return group_mixture_logjoint(x, table, spec, grad);
  };
  return target;
}

GroupMixturePosterior fit_group_mixture(const MeasurementTable& table,
                                        const GroupMixtureSpec& spec, const NutsConfig& mcmc) {
  check_spec(spec);
  if (static_cast<int>(table.group_names.size()) != spec.num_groups)
    throw std::invalid_argument("fit_group_mixture: spec group count must match the table");
  std::vector<int> counts(table.group_names.size(), 0);
  double y_max = 0.0;
  for (const auto& r : table.rows) {
    counts.at(static_cast<std::size_t>(r.group))++;
    y_max = std::max(y_max, r.y);
  }
  for (std::size_t g = 0; g < counts.size(); ++g)
    if (counts[g] == 0)
      throw std::invalid_argument("fit_group_mixture: group '" + table.group_names[g] +
                                  "' has no rows");

  GroupMixturePosterior post;
  post.spec = spec;
  post.group_names = table.group_names;
  post.bounds_exceeded = y_max >= spec.mu_hi;

  post.chains = nuts_sample(group_mixture_target(table, spec), mcmc);
  post.diag = diagnostics(post.chains);
  post.unreliable = post.chains.divergence_rate() > 0.05;

  for (const Eigen::MatrixXd& chain : post.chains.draws)
    for (Eigen::Index i = 0; i < chain.rows(); ++i)
      post.draws.push_back(unpack_group_params(chain.row(i).transpose(), spec));
  return post;
}

double group_mixture_density(const GroupMixtureDraw& draw, int group, double y) {
  const auto& pi = draw.pi.at(static_cast<std::size_t>(group));
  double f = 0.0;
  for (Eigen::Index k = 0; k < pi.size(); ++k)
    f += pi(k) * std::exp(log_truncated_normal(y, draw.mu(k), draw.sigma(k)));
  return f;
}

Eigen::VectorXd group_posterior_predictive(const GroupMixturePosterior& post, int group, int n,
                                           Rng& rng) {
  if (group < 0 || group >= post.spec.num_groups)
    throw std::invalid_argument("group_posterior_predictive: group out of range");
  if (post.draws.empty())
    throw std::invalid_argument("group_posterior_predictive: empty posterior");
  Eigen::VectorXd out(n);
  std::uniform_int_distribution<std::size_t> pick(0, post.draws.size() - 1);
  for (int i = 0; i < n; ++i) {
    const GroupMixtureDraw& d = post.draws[pick(rng)];
    const Eigen::Index k = rcategorical(rng, d.pi[static_cast<std::size_t>(group)]);
    out(i) = rtruncnormal_pos(rng, d.mu(k), d.sigma(k));
  }
  return out;
}

void save_group_posterior(const GroupMixturePosterior& post, const std::string& chains_path,
                          const std::string& spec_path) {
  save_chains(post.chains, chains_path);
  json j;
  j["K"] = post.spec.K;
  j["alpha_dp"] = post.spec.alpha_dp;
  j["mu_lo"] = post.spec.mu_lo;
  j["mu_hi"] = post.spec.mu_hi;
  j["sigma_lo"] = post.spec.sigma_lo;
  j["sigma_hi"] = post.spec.sigma_hi;
  j["num_groups"] = post.spec.num_groups;
  j["group_names"] = post.group_names;
  j["unreliable"] = post.unreliable;
  j["divergences"] = post.diag.divergences;
  if (post.diag.rhat_available)
    j["max_rhat"] = post.diag.max_rhat();
  std::ofstream out(spec_path);
  if (!out) throw std::runtime_error("cannot write spec file: " + spec_path);
  out << j.dump(2);
}

}  // namespace critic
