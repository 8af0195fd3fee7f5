// Convergence diagnostics for sampled chains: rank-normalised split R-hat and
// bulk effective sample size.
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "critic/nuts.hpp"

namespace critic {

struct ChainDiagnostics {
  Eigen::VectorXd rhat;  // per dimension; empty when only one chain was run
  Eigen::VectorXd ess;   // bulk ESS per dimension (0 for degenerate dims)
  std::vector<int> degenerate_dims;  // dims whose chains carry no variation
  int divergences = 0;
  bool rhat_available = false;

  double max_rhat() const { return rhat.size() > 0 ? rhat.maxCoeff() : 0.0; }
  double min_ess() const { return ess.size() > 0 ? ess.minCoeff() : 0.0; }
};

ChainDiagnostics diagnostics(const Chains& chains);

// Rank-normalised split R-hat / bulk ESS over explicit sequences (one vector
// of draws per chain); exposed for reuse beyond the NUTS wrapper.
double split_rhat(const std::vector<Eigen::VectorXd>& sequences);
double bulk_ess(const std::vector<Eigen::VectorXd>& sequences);

}  // namespace critic
