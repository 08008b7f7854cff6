#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fairprobe/cofair.hpp"
#include "fairprobe/equalize.hpp"
#include "fairprobe/ranking.hpp"

namespace fairprobe {

struct SearchConfig {
  int d_max = 3;
  int branching = 3;
  // Gate candidates against the global baseline fairness (default) or, for
  // exploration, against the parent branch's score.
  bool parent_relative_gate = false;
  EqualizeParams eq;
  RankingParams ranking;
};

struct SearchNode {
  std::int64_t parent = -1;
  int depth = 0;
  std::optional<Assignment> assignment;  // absent at the root
  std::optional<EvalResult> eval;        // absent at the root
  std::optional<RankScore> rank;
  std::vector<std::uint32_t> children;
};

struct SearchTree {
  std::vector<SearchNode> nodes;  // nodes[0] is the root
  EvalResult baseline;

  AssignmentCombination branch_to(std::size_t node) const;
};

// Cached per-combination evaluations, keyed by canonical encoding plus the
// dataset fingerprint. nullopt records an insufficient-samples outcome.
class EvalCache {
 public:
  static std::string key(const std::string& encoding, const std::string& fingerprint);

  bool lookup(const std::string& key, std::optional<EvalResult>* out) const;
  void store(const std::string& key, const std::optional<EvalResult>& value);

  std::size_t size() const;
  std::uint64_t hits() const { return hits_; }

  void load_jsonl(const std::string& path);  // missing file is fine
  void save_jsonl(const std::string& path) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::optional<EvalResult>> entries_;
  mutable std::uint64_t hits_ = 0;
};

// Equalize with the empty combination; sampling is still applied. Throws
// InsufficientSamplesError when even the unfiltered dataset fails the guards.
EvalResult compute_baseline(const Dataset& data, const ClusterModel& model,
                            const EqualizeParams& params);

// Candidate assignments for a model: both labels of every cluster.
std::vector<Assignment> all_assignments(const ClusterModel& model);

// Evaluates every unused candidate against the branch, gates on fairness
// improvement, ranks survivors and attaches the top-n as children.
void expand_node(SearchTree& tree, std::size_t node_index,
                 const std::vector<Assignment>& candidates, const Dataset& data,
                 const ClusterModel& model, const SearchConfig& config,
                 EvalCache* cache);

// Breadth-first expansion of every node at depths 0..d_max.
SearchTree run_search(const Dataset& data, const ClusterModel& model,
                      const SearchConfig& config, const EvalResult& baseline,
                      EvalCache* cache);

struct CombinationRow {
  std::string encoding;
  AssignmentCombination combo;
  std::size_t assignments = 0;
  EvalResult eval;
  RankScore rank;
  double cofair = 0.0;
  bool has_cofair = false;
};

// Deduplicated tree combinations, best fairness first (ties: fewer
// assignments, then encoding). CoFair is attached when a distribution is
// given.
std::vector<CombinationRow> top_combinations(const SearchTree& tree,
                                             const ClusterModel& model, std::size_t k,
                                             const FairnessDistribution* dist);

struct AttributeLabelDistribution {
  std::string attribute;            // harmonized display name
  std::array<double, 3> freq{};     // shares of -1, 0, +1
  std::optional<int> strong_label;  // label with share >= 0.9, if any
};

// Label shares per attribute over the templates surviving the combination's
// filter, attributes of assigned clusters excluded.
std::vector<AttributeLabelDistribution> assignment_distribution(
    const Dataset& data, const ClusterModel& model, const AssignmentCombination& combo);

}  // namespace fairprobe
