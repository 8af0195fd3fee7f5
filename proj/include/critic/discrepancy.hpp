// Posterior discrepancy summaries: categorical KL upperbound draws from
// control to each model group, and the resulting model rankings.
#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "critic/group_model.hpp"
#include "critic/histogram.hpp"
#include "critic/statistics.hpp"

namespace critic {

// sum_k p_k log(p_k / q_k), 0 log 0 = 0, +inf when q lacks mass p carries.
double kl_categorical(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// One KL value per retained draw; direction is control -> model unless
// reversed for sensitivity analysis.
Eigen::VectorXd posterior_kl_upperbound(const GroupMixturePosterior& post, int control_group,
                                        int model_group, bool reverse = false);

struct KlSummary {
  std::string control;
  std::string model;
  Eigen::VectorXd draws;
  double mean = 0.0;
  double lo90 = 0.0;  // central 90% interval
  double hi90 = 0.0;
  bool unreliable_fit = false;
};

KlSummary summarize_kl(const std::string& control, const std::string& model,
                       Eigen::VectorXd draws, bool unreliable_fit);

struct DesignReport {
  Design design = Design::Marginal;
  std::vector<KlSummary> models;
  std::vector<std::string> ranking;  // ascending posterior-mean KL
};

struct DiscrepancyReport {
  std::vector<DesignReport> designs;
  std::string config_hash;
  std::uint64_t master_seed = 0;
};

// Ascending by posterior-mean KL; ties by interval width, then name.
std::vector<std::string> rank_models(const std::vector<KlSummary>& models);

DesignReport make_design_report(Design design, std::vector<KlSummary> models);

// Report JSON with embedded KL-draw histograms; CSV ranking export.
std::string discrepancy_report_json(const DiscrepancyReport& report, int hist_bins = 60);
void save_ranking_csv(const DiscrepancyReport& report, const std::string& path);

}  // namespace critic
