// Sample containers and group-file parsing. Everything here is immutable
// after construction and safe to share across parallel workers.
#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace critic {

enum class SampleKind { BinaryVector, TokenSequence, CountVector, RealVector };

std::string to_string(SampleKind kind);
SampleKind sample_kind_from_string(const std::string& name);

struct Sample {
  SampleKind kind = SampleKind::RealVector;
  Eigen::VectorXd payload;  // token ids and counts are stored as exact doubles

  Eigen::Index dim() const { return payload.size(); }
};

// Throws std::invalid_argument when the payload violates the kind's domain
// (binary entries outside {0,1}, negative/fractional counts, non-finite reals).
void validate_sample(const Sample& s);

enum class GroupRole { Control, Model };

struct GroupPairing {
  std::string reconstruction_group;
  std::string seed_group;  // aligned index-wise, equal sizes
};

class GroupedSamples {
 public:
  void add_sample(const std::string& group, Sample s);
  void add_samples(const std::string& group, std::vector<Sample> samples);
  void set_role(const std::string& group, GroupRole role);
  void add_pairing(const std::string& reconstruction_group, const std::string& seed_group);

  bool has_group(const std::string& group) const;
  const std::vector<Sample>& group(const std::string& name) const;
  const std::vector<std::string>& group_names() const { return order_; }
  std::size_t num_groups() const { return order_.size(); }
  std::optional<GroupRole> role(const std::string& group) const;
  const std::vector<GroupPairing>& pairings() const { return pairings_; }

  // Per-group labels (optional per record in the file schema).
  void set_labels(const std::string& group, std::vector<int> labels);
  const std::vector<int>* labels(const std::string& group) const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::vector<Sample>> groups_;
  std::map<std::string, GroupRole> roles_;
  std::map<std::string, std::vector<int>> labels_;
  std::vector<GroupPairing> pairings_;
};

struct LabeledSamples {
  std::vector<Sample> samples;
  std::vector<int> labels;  // in [0, num_classes)
  int num_classes = 0;
};

// Pull one group plus its labels out of a GroupedSamples; num_classes is
// max(label)+1 unless a larger value is requested.
LabeledSamples labeled_group(const GroupedSamples& g, const std::string& group,
                             int num_classes = 0);

enum class GroupFileFormat { Jsonl, Csv };

// JSONL schema: {"group": str, "kind": str, "payload": [..]} with optional
// "label". CSV carries real-vector rows only: header "group,x0,..,xd".
GroupedSamples load_groups(const std::string& path, GroupFileFormat format);
GroupedSamples parse_groups_jsonl(const std::string& text);

std::string serialize_groups_jsonl(const GroupedSamples& g);
void save_groups_jsonl(const GroupedSamples& g, const std::string& path);

// Vocabulary sidecar {"token": id}; returned as id-ordered token list.
std::map<std::string, int> load_vocabulary(const std::string& path);

// Deterministic partition of one named group: first part has ceil(fraction*N)
// samples. Both returned containers hold just that group (labels preserved).
std::pair<GroupedSamples, GroupedSamples> split_holdout(const GroupedSamples& g,
                                                        const std::string& group,
                                                        double fraction,
                                                        std::uint64_t seed);

}  // namespace critic
