// Marginal and conditional lppd statistics over sample streams, assembled
// into the grouped measurement table the group model consumes.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "critic/data.hpp"
#include "critic/lsm.hpp"

namespace critic {

enum class Design { Marginal, ReconstructionMarginal, Conditional };

std::string to_string(Design d);
Design design_from_string(const std::string& name);

struct MeasurementRow {
  double y = 0.0;  // negative lppd, clipped positive
  int group = 0;
  bool clipped = false;
};

struct MeasurementTable {
  Design design = Design::Marginal;
  std::vector<MeasurementRow> rows;
  std::vector<std::string> group_names;  // control first
  int posterior_draws = 0;
  std::uint64_t seed = 0;
  double clip_eps = 1e-3;

  int clip_count() const;
  std::vector<double> group_values(int group) const;
};

struct StreamSpec {
  std::string group_name;     // name the row group carries in the table
  GroupRole role = GroupRole::Model;
  std::string samples_group;  // outcome stream inside the GroupedSamples
  std::string seeds_group;    // conditional designs only; paired index-wise
  int count = -1;             // cap on outcomes (-1 keeps all)
};

struct DesignSpec {
  Design design = Design::Marginal;
  std::vector<StreamSpec> streams;
  int posterior_draws = 512;  // S; capped at the posterior's draw count
  double clip_eps = 1e-3;
};

// log-mean-exp over posterior draws of the per-draw predictive density.
double lppd(const LsmPosterior& post, const Sample& x, Rng& rng, int max_draws = -1);

// Eq.-2 statistic: every draw is seed-updated before scoring the replication.
double conditional_lppd(const LsmPosterior& post, const Sample& x_seed, const Sample& x_rep,
                        Rng& rng, int max_draws = -1);

MeasurementTable collect_measurements(const LsmPosterior& post, const GroupedSamples& streams,
                                      const DesignSpec& spec, std::uint64_t seed, int jobs = 1);

// CSV with header y,group,design plus a JSON metadata sidecar.
void save_measurements(const MeasurementTable& table, const std::string& csv_path,
                       const std::string& meta_path);
MeasurementTable load_measurements(const std::string& csv_path, const std::string& meta_path);

}  // namespace critic
