#include "critic/statistics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "critic/math.hpp"
#include "critic/parallel.hpp"

namespace critic {

using json = nlohmann::json;

std::string to_string(Design d) {
  switch (d) {
    case Design::Marginal: return "marginal";
    case Design::ReconstructionMarginal: return "reconstruction-marginal";
    case Design::Conditional: return "conditional";
  }
  return "unknown";
}

Design design_from_string(const std::string& name) {
  if (name == "marginal") return Design::Marginal;
  if (name == "reconstruction-marginal") return Design::ReconstructionMarginal;
  if (name == "conditional") return Design::Conditional;
  throw std::invalid_argument("unknown design: " + name);
}

int MeasurementTable::clip_count() const {
  int n = 0;
  for (const auto& r : rows) n += r.clipped ? 1 : 0;
  return n;
}

std::vector<double> MeasurementTable::group_values(int group) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.group == group) out.push_back(r.y);
  return out;
}

double lppd(const LsmPosterior& post, const Sample& x, Rng& rng, int max_draws) {
  const Eigen::Index S = max_draws > 0
                             ? std::min<Eigen::Index>(max_draws, post.num_draws())
                             : post.num_draws();
  if (S < 1) throw std::invalid_argument("lppd: posterior has no draws");
  Eigen::VectorXd vals(S);
  for (Eigen::Index s = 0; s < S; ++s) vals(s) = log_pred_density(post, s, x, rng);
  return log_mean_exp(vals);
}

double conditional_lppd(const LsmPosterior& post, const Sample& x_seed, const Sample& x_rep,
                        Rng& rng, int max_draws) {
  const Eigen::Index S = max_draws > 0
                             ? std::min<Eigen::Index>(max_draws, post.num_draws())
                             : post.num_draws();
  if (S < 1) throw std::invalid_argument("conditional_lppd: posterior has no draws");
  Eigen::VectorXd vals(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const LsmDraw updated = seed_update(post, s, x_seed, rng);
    vals(s) = log_pred_density_draw(post, updated, x_rep, rng);
  }
  return log_mean_exp(vals);
}

MeasurementTable collect_measurements(const LsmPosterior& post, const GroupedSamples& streams,
                                      const DesignSpec& spec, std::uint64_t seed, int jobs) {
  // control group first, exactly one
  std::vector<const StreamSpec*> ordered;
  for (const auto& s : spec.streams)
    if (s.role == GroupRole::Control) ordered.push_back(&s);
  if (ordered.size() != 1)
    throw std::invalid_argument("collect_measurements: exactly one control stream required");
  for (const auto& s : spec.streams)
    if (s.role == GroupRole::Model) ordered.push_back(&s);

  struct Task {
    const Sample* outcome;
    const Sample* seed_sample;  // null for marginal designs
    int group;
  };
  std::vector<Task> tasks;
  MeasurementTable table;
  table.design = spec.design;
  table.posterior_draws = static_cast<int>(
      spec.posterior_draws > 0 ? std::min<Eigen::Index>(spec.posterior_draws, post.num_draws())
                               : post.num_draws());
  table.seed = seed;
  table.clip_eps = spec.clip_eps;

  for (std::size_t g = 0; g < ordered.size(); ++g) {
    const StreamSpec& st = *ordered[g];
    table.group_names.push_back(st.group_name);
    if (!streams.has_group(st.samples_group))
      throw std::invalid_argument("collect_measurements: missing stream '" + st.samples_group + "'");
    const auto& outcomes = streams.group(st.samples_group);
    const std::size_t n = st.count >= 0
                              ? std::min<std::size_t>(outcomes.size(), static_cast<std::size_t>(st.count))
                              : outcomes.size();
    const std::vector<Sample>* seeds = nullptr;
    if (spec.design == Design::Conditional) {
      if (st.seeds_group.empty())
        throw std::invalid_argument("collect_measurements: conditional stream '" + st.group_name +
                                    "' needs a paired seed stream");
      seeds = &streams.group(st.seeds_group);
      if (seeds->size() < n)
        throw std::invalid_argument("collect_measurements: seed stream shorter than outcomes for '" +
                                    st.group_name + "'");
    }
    for (std::size_t i = 0; i < n; ++i)
      tasks.push_back({&outcomes[i], seeds ? &(*seeds)[i] : nullptr, static_cast<int>(g)});
  }

  std::vector<double> values(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    // per-row stream keeps results independent of worker scheduling
    Rng rng = make_stream(seed, 0x57a7, i);
    const Task& t = tasks[i];
    values[i] = t.seed_sample == nullptr
                    ? lppd(post, *t.outcome, rng, table.posterior_draws)
                    : conditional_lppd(post, *t.seed_sample, *t.outcome, rng, table.posterior_draws);
  });

  // y must be finite and positive for the truncated-Normal group model
  double max_finite = 0.0;
  for (double v : values)
    if (std::isfinite(v)) max_finite = std::max(max_finite, -v);
  if (max_finite <= 0.0) max_finite = 1.0;
  table.rows.reserve(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    MeasurementRow row;
    row.group = tasks[i].group;
    double y = -values[i];
    if (!std::isfinite(y)) {
      row.clipped = true;
      y = y > 0.0 ? max_finite : spec.clip_eps;
    } else if (y <= 0.0) {
      row.clipped = true;
      y = spec.clip_eps;
    }
    row.y = y;
    table.rows.push_back(row);
  }
  return table;
}

void save_measurements(const MeasurementTable& table, const std::string& csv_path,
                       const std::string& meta_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write table: " + csv_path);
  csv << "y,group,design\n";
  csv.precision(17);
  for (const auto& r : table.rows)
    csv << r.y << ',' << table.group_names.at(static_cast<std::size_t>(r.group)) << ','
        << to_string(table.design) << '\n';

  json meta;
  meta["design"] = to_string(table.design);
  meta["group_names"] = table.group_names;
  meta["posterior_draws"] = table.posterior_draws;
  meta["seed"] = table.seed;
  meta["clip_eps"] = table.clip_eps;
  meta["clip_count"] = table.clip_count();
  json clipped = json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (table.rows[i].clipped) clipped.push_back(i);
  meta["clipped_rows"] = std::move(clipped);
  std::ofstream mf(meta_path);
  if (!mf) throw std::runtime_error("cannot write table metadata: " + meta_path);
  mf << meta.dump(2);
}

MeasurementTable load_measurements(const std::string& csv_path, const std::string& meta_path) {
  std::ifstream mf(meta_path);
  if (!mf) throw std::invalid_argument("cannot open table metadata: " + meta_path);
  json meta = json::parse(mf);

  MeasurementTable table;
  table.design = design_from_string(meta.at("design").get<std::string>());
  table.group_names = meta.at("group_names").get<std::vector<std::string>>();
  table.posterior_draws = meta.at("posterior_draws").get<int>();
  table.seed = meta.at("seed").get<std::uint64_t>();
  table.clip_eps = meta.at("clip_eps").get<double>();

  std::ifstream csv(csv_path);
  if (!csv) throw std::invalid_argument("cannot open table: " + csv_path);
  std::string line;
  std::getline(csv, line);  // header
  if (line.rfind("y,group,design", 0) != 0)
    throw std::invalid_argument("measurement CSV missing y,group,design header");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string y_cell, group_cell, design_cell;
    std::getline(row, y_cell, ',');
    std::getline(row, group_cell, ',');
    std::getline(row, design_cell, ',');
    MeasurementRow r;
    r.y = std::stod(y_cell);
    const auto it = std::find(table.group_names.begin(), table.group_names.end(), group_cell);
    if (it == table.group_names.end())
      throw std::invalid_argument("measurement CSV row names unknown group '" + group_cell + "'");
    r.group = static_cast<int>(it - table.group_names.begin());
    table.rows.push_back(r);
  }
  for (const auto& idx : meta.at("clipped_rows"))
    table.rows.at(idx.get<std::size_t>()).clipped = true;
  return table;
}

}  // namespace critic
