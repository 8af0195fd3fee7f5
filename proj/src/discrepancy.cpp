#include "critic/discrepancy.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "critic/math.hpp"

namespace critic {

using json = nlohmann::json;

double kl_categorical(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_categorical: length mismatch");
  double kl = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p(k) == 0.0) continue;
    if (q(k) <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p(k) * (std::log(p(k)) - std::log(q(k)));
  }
  return std::max(kl, 0.0);  // guards tiny negative round-off at p ~ q
}

Eigen::VectorXd posterior_kl_upperbound(const GroupMixturePosterior& post, int control_group,
                                        int model_group, bool reverse) {
  if (control_group < 0 || control_group >= post.spec.num_groups || model_group < 0 ||
      model_group >= post.spec.num_groups)
    throw std::invalid_argument("posterior_kl_upperbound: group out of range");
  Eigen::VectorXd out(static_cast<Eigen::Index>(post.draws.size()));
  for (std::size_t s = 0; s < post.draws.size(); ++s) {
    const auto& pi_c = post.draws[s].pi[static_cast<std::size_t>(control_group)];
    const auto& pi_m = post.draws[s].pi[static_cast<std::size_t>(model_group)];
    out(static_cast<Eigen::Index>(s)) =
        reverse ? kl_categorical(pi_m, pi_c) : kl_categorical(pi_c, pi_m);
  }
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double idx = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = idx - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

KlSummary summarize_kl(const std::string& control, const std::string& model,
                       Eigen::VectorXd draws, bool unreliable_fit) {
  KlSummary s;
  s.control = control;
  s.model = model;
  s.mean = draws.size() > 0 ? draws.mean() : 0.0;
  std::vector<double> sorted(draws.data(), draws.data() + draws.size());
  std::sort(sorted.begin(), sorted.end());
  s.lo90 = quantile_sorted(sorted, 0.05);
  s.hi90 = quantile_sorted(sorted, 0.95);
  s.draws = std::move(draws);
  s.unreliable_fit = unreliable_fit;
  return s;
}

std::vector<std::string> rank_models(const std::vector<KlSummary>& models) {
  std::vector<const KlSummary*> order;
  order.reserve(models.size());
  for (const auto& m : models) order.push_back(&m);
  std::sort(order.begin(), order.end(), [](const KlSummary* a, const KlSummary* b) {
    if (a->mean != b->mean) return a->mean < b->mean;
    const double wa = a->hi90 - a->lo90;
    const double wb = b->hi90 - b->lo90;
    if (wa != wb) return wa < wb;
    return a->model < b->model;
  });
  std::vector<std::string> out;
  out.reserve(order.size());
  for (const auto* m : order) out.push_back(m->model);
  return out;
}

DesignReport make_design_report(Design design, std::vector<KlSummary> models) {
  if (models.empty()) throw std::invalid_argument("make_design_report: need >= 1 model group");
  DesignReport r;
  r.design = design;
  r.ranking = rank_models(models);
  r.models = std::move(models);
  return r;
}

std::string discrepancy_report_json(const DiscrepancyReport& report, int hist_bins) {
  json j;
  j["config_hash"] = report.config_hash;
  j["master_seed"] = report.master_seed;
  json designs = json::array();
  for (const auto& d : report.designs) {
    json dj;
    dj["design"] = to_string(d.design);
    dj["ranking"] = d.ranking;
    json models = json::array();
    for (const auto& m : d.models) {
      json mj;
      mj["control"] = m.control;
      mj["model"] = m.model;
      mj["mean"] = m.mean;
      mj["lo90"] = m.lo90;
      mj["hi90"] = m.hi90;
      mj["unreliable_fit"] = m.unreliable_fit;
      double hist_hi = m.draws.size() > 0 ? m.draws.maxCoeff() : 1.0;
      if (!(hist_hi > 0.0)) hist_hi = 1.0;
      const Histogram h = make_histogram(m.draws, hist_bins, 0.0, hist_hi);
      mj["hist_edges"] = h.edges;
      mj["hist_counts"] = h.counts;
      models.push_back(std::move(mj));
    }
    dj["models"] = std::move(models);
    designs.push_back(std::move(dj));
  }
  j["designs"] = std::move(designs);
  return j.dump(2);
}

void save_ranking_csv(const DiscrepancyReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ranking CSV: " + path);
  out << "design,rank,model,mean_kl,lo90,hi90,unreliable\n";
  out.precision(17);
  for (const auto& d : report.designs) {
    for (std::size_t r = 0; r < d.ranking.size(); ++r) {
      const auto it = std::find_if(d.models.begin(), d.models.end(),
                                   [&](const KlSummary& m) { return m.model == d.ranking[r]; });
      out << to_string(d.design) << ',' << (r + 1) << ',' << it->model << ',' << it->mean << ','
          << it->lo90 << ',' << it->hi90 << ',' << (it->unreliable_fit ? 1 : 0) << '\n';
    }
  }
}

}  // namespace critic
