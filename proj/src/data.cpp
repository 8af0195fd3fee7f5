#include "critic/data.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "critic/rng.hpp"

namespace critic {

using json = nlohmann::json;

std::string to_string(SampleKind kind) {
  switch (kind) {
    case SampleKind::BinaryVector: return "binary-vector";
    case SampleKind::TokenSequence: return "token-sequence";
    case SampleKind::CountVector: return "count-vector";
    case SampleKind::RealVector: return "real-vector";
  }
  return "unknown";
}

SampleKind sample_kind_from_string(const std::string& name) {
  if (name == "binary-vector") return SampleKind::BinaryVector;
  if (name == "token-sequence") return SampleKind::TokenSequence;
  if (name == "count-vector") return SampleKind::CountVector;
  if (name == "real-vector") return SampleKind::RealVector;
  throw std::invalid_argument("unknown sample kind: " + name);
}

namespace {

bool is_integral_value(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

void validate_sample(const Sample& s) {
  for (Eigen::Index i = 0; i < s.payload.size(); ++i) {
    const double v = s.payload(i);
    switch (s.kind) {
      case SampleKind::BinaryVector:
        if (v != 0.0 && v != 1.0)
          throw std::invalid_argument("binary-vector entry not in {0,1}: " + std::to_string(v));
        break;
      case SampleKind::TokenSequence:
        if (!is_integral_value(v) || v < 0.0)
          throw std::invalid_argument("token-sequence id must be a non-negative integer");
        break;
      case SampleKind::CountVector:
        if (!is_integral_value(v) || v < 0.0)
          throw std::invalid_argument("count-vector entry must be a non-negative integer");
        break;
      case SampleKind::RealVector:
        if (!std::isfinite(v))
          throw std::invalid_argument("real-vector entry must be finite");
        break;
    }
  }
}

void GroupedSamples::add_sample(const std::string& group, Sample s) {
  validate_sample(s);
  auto it = groups_.find(group);
  if (it == groups_.end()) {
    order_.push_back(group);
    groups_[group].push_back(std::move(s));
    return;
  }
  const Sample& first = it->second.front();
  if (first.kind != s.kind)
    throw std::invalid_argument("group '" + group + "' mixes sample kinds");
  const bool fixed_dim = s.kind != SampleKind::TokenSequence;
  if (fixed_dim && first.dim() != s.dim())
    throw std::invalid_argument("group '" + group + "' mixes dimensions");
  it->second.push_back(std::move(s));
}

void GroupedSamples::add_samples(const std::string& group, std::vector<Sample> samples) {
  for (auto& s : samples) add_sample(group, std::move(s));
}

void GroupedSamples::set_role(const std::string& group, GroupRole role) {
  roles_[group] = role;
}

void GroupedSamples::add_pairing(const std::string& reconstruction_group,
                                 const std::string& seed_group) {
  if (!has_group(reconstruction_group) || !has_group(seed_group))
    throw std::invalid_argument("pairing references a missing group");
  if (group(reconstruction_group).size() != group(seed_group).size())
    throw std::invalid_argument("paired groups must have equal size");
  pairings_.push_back({reconstruction_group, seed_group});
}

bool GroupedSamples::has_group(const std::string& group) const {
  return groups_.count(group) > 0;
}

const std::vector<Sample>& GroupedSamples::group(const std::string& name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) throw std::invalid_argument("unknown group: " + name);
  return it->second;
}

std::optional<GroupRole> GroupedSamples::role(const std::string& group) const {
  auto it = roles_.find(group);
  if (it == roles_.end()) return std::nullopt;
  return it->second;
}

void GroupedSamples::set_labels(const std::string& group, std::vector<int> labels) {
  if (!has_group(group)) throw std::invalid_argument("unknown group: " + group);
  if (labels.size() != groups_.at(group).size())
    throw std::invalid_argument("labels length must equal sample count");
  labels_[group] = std::move(labels);
}

const std::vector<int>* GroupedSamples::labels(const std::string& group) const {
  auto it = labels_.find(group);
  return it == labels_.end() ? nullptr : &it->second;
}

LabeledSamples labeled_group(const GroupedSamples& g, const std::string& group,
                             int num_classes) {
  LabeledSamples out;
  out.samples = g.group(group);
  const std::vector<int>* labels = g.labels(group);
  if (labels == nullptr)
    throw std::invalid_argument("group '" + group + "' carries no labels");
  out.labels = *labels;
  int max_label = -1;
  for (int l : out.labels) {
    if (l < 0) throw std::invalid_argument("labels must be non-negative");
    max_label = std::max(max_label, l);
  }
  out.num_classes = std::max(num_classes, max_label + 1);
  return out;
}

namespace {

Sample sample_from_record(const json& rec, std::size_t line_no) {
  if (!rec.contains("group") || !rec.contains("kind") || !rec.contains("payload"))
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": record must carry group, kind, payload");
  Sample s;
  s.kind = sample_kind_from_string(rec.at("kind").get<std::string>());
  const auto& payload = rec.at("payload");
  if (!payload.is_array())
    throw std::invalid_argument("line " + std::to_string(line_no) + ": payload must be an array");
  s.payload.resize(static_cast<Eigen::Index>(payload.size()));
  Eigen::Index i = 0;
  for (const auto& v : payload) {
    if (!v.is_number())
      throw std::invalid_argument("line " + std::to_string(line_no) + ": payload entry not numeric");
    s.payload(i++) = v.get<double>();
  }
  return s;
}

}  // namespace

GroupedSamples parse_groups_jsonl(const std::string& text) {
  GroupedSamples out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::vector<int>> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string group = rec.at("group").get<std::string>();
    Sample s = sample_from_record(rec, line_no);
    try {
      out.add_sample(group, std::move(s));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (rec.contains("label")) {
      labels[group].push_back(rec.at("label").get<int>());
    } else if (labels.count(group)) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": group mixes labelled and unlabelled records");
    }
  }
  for (auto& [group, ls] : labels) {
    if (ls.size() != out.group(group).size())
      throw std::invalid_argument("group '" + group + "' mixes labelled and unlabelled records");
    out.set_labels(group, std::move(ls));
  }
  return out;
}

namespace {

GroupedSamples parse_groups_csv(std::istream& in) {
  GroupedSamples out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.rfind("group,", 0) != 0)
        throw std::invalid_argument("line 1: CSV header must start with 'group,'");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    if (!std::getline(row, cell, ','))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": missing group cell");
    const std::string group = cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": non-numeric cell '" +
                                    cell + "'");
      }
    }
    Sample s;
    s.kind = SampleKind::RealVector;
    s.payload = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                  static_cast<Eigen::Index>(values.size()));
    try {
      out.add_sample(group, std::move(s));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

GroupedSamples load_groups(const std::string& path, GroupFileFormat format) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open group file: " + path);
  if (format == GroupFileFormat::Csv) return parse_groups_csv(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_groups_jsonl(buf.str());
}

std::string serialize_groups_jsonl(const GroupedSamples& g) {
  std::ostringstream out;
  for (const std::string& name : g.group_names()) {
    const auto& samples = g.group(name);
    const std::vector<int>* labels = g.labels(name);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      json rec;
      rec["group"] = name;
      rec["kind"] = to_string(samples[i].kind);
      json payload = json::array();
      for (Eigen::Index j = 0; j < samples[i].payload.size(); ++j) {
        const double v = samples[i].payload(j);
        if (samples[i].kind == SampleKind::RealVector) {
          payload.push_back(v);
        } else {
          payload.push_back(static_cast<long long>(v));
        }
      }
      rec["payload"] = std::move(payload);
      if (labels != nullptr) rec["label"] = (*labels)[i];
      out << rec.dump() << '\n';
    }
  }
  return out.str();
}

void save_groups_jsonl(const GroupedSamples& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write group file: " + path);
  out << serialize_groups_jsonl(g);
}

std::map<std::string, int> load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open vocabulary file: " + path);
  json v = json::parse(in);
  std::map<std::string, int> out;
  for (auto it = v.begin(); it != v.end(); ++it) out[it.key()] = it.value().get<int>();
  return out;
}

std::pair<GroupedSamples, GroupedSamples> split_holdout(const GroupedSamples& g,
                                                        const std::string& group,
                                                        double fraction,
                                                        std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("split_holdout: fraction must lie in (0,1)");
  const auto& samples = g.group(group);
  if (samples.size() < 2)
    throw std::invalid_argument("split_holdout: group needs at least 2 samples");

  std::vector<std::size_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = make_stream(seed, 0x5917ULL);
  std::shuffle(idx.begin(), idx.end(), rng);

  const std::size_t n_first =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(samples.size())));
  const std::vector<int>* labels = g.labels(group);

  GroupedSamples first, second;
  std::vector<int> labels_first, labels_second;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    GroupedSamples& dst = i < n_first ? first : second;
    dst.add_sample(group, samples[idx[i]]);
    if (labels != nullptr)
      (i < n_first ? labels_first : labels_second).push_back((*labels)[idx[i]]);
  }
  if (labels != nullptr) {
    first.set_labels(group, std::move(labels_first));
    second.set_labels(group, std::move(labels_second));
  }
  if (auto r = g.role(group)) {
    first.set_role(group, *r);
    second.set_role(group, *r);
  }
  return {std::move(first), std::move(second)};
}

}  // namespace critic
