// Grouped mixed-membership model over scalar measurements: K shared
// truncated-Normal components, per-group stick-breaking weights with
// Beta(1, alpha) fractions, posterior via NUTS on the fully marginalised
// (hence continuous) joint.
#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "critic/chain_stats.hpp"
#include "critic/nuts.hpp"
#include "critic/statistics.hpp"

namespace critic {

struct GroupMixtureSpec {
  int K = 5;
  double alpha_dp = 1.0;
  double mu_lo = 0.0;
  double mu_hi = 1.0;
  double sigma_lo = 1e-3;
  double sigma_hi = 1.0;
  int num_groups = 2;
};

// Data-driven base-measure bounds: mu in (0, 1.5*max y), sigma in
// (1e-3*range, range). Recorded in every report.
GroupMixtureSpec make_group_spec(const MeasurementTable& table, int K, double alpha_dp = 1.0);

struct GroupMixtureDraw {
  std::vector<Eigen::VectorXd> pi;  // per group, K-simplex
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;
};

struct GroupMixturePosterior {
  GroupMixtureSpec spec;
  std::vector<std::string> group_names;
  std::vector<GroupMixtureDraw> draws;  // all chains concatenated
  Chains chains;                        // unconstrained draws as sampled
  ChainDiagnostics diag;
  bool unreliable = false;       // divergence rate above 5%
  bool bounds_exceeded = false;  // some y fell outside (0, mu_hi)
};

// Unconstrained layout: per group K-1 stick coordinates, then K raw mu, K raw sigma.
Eigen::Index group_param_dim(const GroupMixtureSpec& spec);

// Log joint and its analytic gradient; grad is resized by the callee.
double group_mixture_logjoint(const Eigen::VectorXd& params, const MeasurementTable& table,
                              const GroupMixtureSpec& spec, Eigen::VectorXd& grad);

TargetDensity group_mixture_target(const MeasurementTable& table, const GroupMixtureSpec& spec);

GroupMixtureDraw unpack_group_params(const Eigen::VectorXd& params, const GroupMixtureSpec& spec);

GroupMixturePosterior fit_group_mixture(const MeasurementTable& table,
                                        const GroupMixtureSpec& spec, const NutsConfig& mcmc);

// Mixture density f(y | pi_g, mu, sigma) at given draw parameters.
double group_mixture_density(const GroupMixtureDraw& draw, int group, double y);

Eigen::VectorXd group_posterior_predictive(const GroupMixturePosterior& post, int group, int n,
                                           Rng& rng);

void save_group_posterior(const GroupMixturePosterior& post, const std::string& chains_path,
                          const std::string& spec_path);

}  // namespace critic
