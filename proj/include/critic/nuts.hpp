// No-U-Turn sampler with dual-averaging step-size and diagonal mass-matrix
// adaptation, plus the chain container and its on-disk formats.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace critic {

struct TargetDensity {
  Eigen::Index dim = 0;
  // fills grad (resized by caller) and returns the log density
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)> logp_and_grad;
};

struct NutsConfig {
  int chains = 4;
  int warmup = 1000;
  int iters = 1000;
  double target_accept = 0.8;
  int max_depth = 10;
  std::uint64_t seed = 0;
  double init_jitter = 1.0;  // sd of the standard-normal chain inits
  int jobs = 0;              // 0 = one thread per chain up to hardware
};

struct Chains {
  std::vector<Eigen::MatrixXd> draws;  // per chain: iters x dim (unconstrained)
  Eigen::VectorXd step_size;           // per chain, post-adaptation
  Eigen::MatrixXd mass_diag;           // chains x dim
  std::vector<int> divergences;        // per chain
  std::vector<double> mean_accept;     // per chain
  bool warning = false;                // divergence rate above 25%

  int num_chains() const { return static_cast<int>(draws.size()); }
  Eigen::Index dim() const { return draws.empty() ? 0 : draws.front().cols(); }
  Eigen::Index iters_per_chain() const { return draws.empty() ? 0 : draws.front().rows(); }
  int total_divergences() const;
  double divergence_rate() const;
};

Chains nuts_sample(const TargetDensity& target, const NutsConfig& cfg);

// Columnar binary with a JSON text header; CSV export for inspection.
void save_chains(const Chains& chains, const std::string& path);
Chains load_chains(const std::string& path);
void export_chains_csv(const Chains& chains, const std::string& path);

}  // namespace critic
