#include "fairprobe/search.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "fairprobe/parallel.hpp"

namespace fairprobe {

AssignmentCombination SearchTree::branch_to(std::size_t node) const {
  AssignmentCombination combo;
  std::size_t cur = node;
  while (nodes[cur].parent >= 0) {
    combo.assignments.push_back(*nodes[cur].assignment);
    cur = std::size_t(nodes[cur].parent);
  }
  std::reverse(combo.assignments.begin(), combo.assignments.end());
  return combo;
}

std::string EvalCache::key(const std::string& encoding, const std::string& fingerprint) {
  return encoding + "@" + fingerprint;
}

bool EvalCache::lookup(const std::string& key, std::optional<EvalResult>* out) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return false;
  ++hits_;
  *out = it->second;
  return true;
}

void EvalCache::store(const std::string& key, const std::optional<EvalResult>& value) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_[key] = value;
}

std::size_t EvalCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

namespace {

nlohmann::ordered_json eval_to_json_obj(const EvalResult& e) {
  return nlohmann::ordered_json{{"igarbe_mean", e.igarbe_mean},
                                {"igarbe_std", e.igarbe_std},
                                {"fnmr_total_mean", e.fnmr_total_mean},
                                {"fnmr_male", e.per_group[0].fnmr},
                                {"fnmr_female", e.per_group[1].fnmr},
                                {"fmr_male", e.per_group[0].fmr},
                                {"fmr_female", e.per_group[1].fmr},
                                {"threshold_mean", e.threshold_mean},
                                {"retained_genuine", e.retained_genuine},
                                {"repetitions", e.repetitions}};
}

EvalResult eval_from_json_obj(const nlohmann::json& j) {
  EvalResult e;
  e.igarbe_mean = j.at("igarbe_mean").get<double>();
  e.igarbe_std = j.at("igarbe_std").get<double>();
  e.fnmr_total_mean = j.at("fnmr_total_mean").get<double>();
  e.per_group[0] = GroupRates{Gender::Male, j.at("fmr_male").get<double>(),
                              j.at("fnmr_male").get<double>()};
  e.per_group[1] = GroupRates{Gender::Female, j.at("fmr_female").get<double>(),
                              j.at("fnmr_female").get<double>()};
  e.threshold_mean = j.at("threshold_mean").get<double>();
  e.retained_genuine = j.at("retained_genuine").get<std::uint64_t>();
  e.repetitions = j.at("repetitions").get<int>();
  return e;
}

}  // namespace

void EvalCache::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  std::lock_guard<std::mutex> lock(mu_);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(path + ": malformed cache line");
    }
    const std::string key = j.at("key").get<std::string>();
    if (j.value("insufficient", false)) {
      entries_[key] = std::nullopt;
    } else {
      entries_[key] = eval_from_json_obj(j.at("eval"));
    }
  }
}

void EvalCache::save_jsonl(const std::string& path) const {
  std::ofstream out(path, std::ios::out | std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [key, value] : entries_) {
    nlohmann::ordered_json j;
    j["key"] = key;
    if (value) {
      j["eval"] = eval_to_json_obj(*value);
    } else {
      j["insufficient"] = true;
    }
    out << j.dump() << '\n';
  }
}

EvalResult compute_baseline(const Dataset& data, const ClusterModel& model,
                            const EqualizeParams& params) {
  const auto res = equalize(data, model, AssignmentCombination{}, params);
  if (!res) {
    throw InsufficientSamplesError(
        "baseline: the unfiltered dataset does not satisfy the sampling guards");
  }
  return *res;
}

std::vector<Assignment> all_assignments(const ClusterModel& model) {
  std::vector<Assignment> out;
  out.reserve(model.clusters.size() * 2);
  for (std::uint32_t c = 0; c < model.clusters.size(); ++c) {
    out.push_back(Assignment{c, 1});
    out.push_back(Assignment{c, -1});
  }
  return out;
}

namespace {

std::optional<EvalResult> evaluate_cached(const Dataset& data, const ClusterModel& model,
                                          const AssignmentCombination& combo,
                                          const EqualizeParams& params, EvalCache* cache) {
  std::string key;
  if (cache != nullptr) {
    key = EvalCache::key(canonical_encoding(combo, model),
                         data.store->dataset_fingerprint);
    std::optional<EvalResult> hit;
    if (cache->lookup(key, &hit)) return hit;
  }
  const auto res = equalize(data, model, combo, params);
  if (cache != nullptr) cache->store(key, res);
  return res;
}

struct Candidate {
  Assignment assignment;
  std::optional<EvalResult> eval;
  RankScore rank;
  std::string encoding;
};

}  // namespace

void expand_node(SearchTree& tree, std::size_t node_index,
                 const std::vector<Assignment>& candidates, const Dataset& data,
                 const ClusterModel& model, const SearchConfig& config,
                 EvalCache* cache) {
  const AssignmentCombination branch = tree.branch_to(node_index);
  const double gate =
      config.parent_relative_gate && tree.nodes[node_index].eval
          ? tree.nodes[node_index].eval->igarbe_mean
          : tree.baseline.igarbe_mean;

  std::vector<Candidate> pool;
  for (const Assignment& a : candidates) {
    if (branch.uses_cluster(a.cluster)) continue;
    pool.push_back(Candidate{a, std::nullopt, {}, {}});
  }

  // The per-candidate filter scans parallelize internally; evaluation results
  // depend only on (seed, combination, dataset), never on this loop's order.
  for (auto& candidate : pool) {
    const auto combo = branch.extended(candidate.assignment);
    candidate.eval = evaluate_cached(data, model, combo, config.eq, cache);
    candidate.encoding = canonical_encoding(combo, model);
  }

  std::vector<Candidate> survivors;
  for (auto& c : pool) {
    if (!c.eval) continue;  // insufficient samples fail the gate
    if (!(c.eval->igarbe_mean > gate)) continue;
    c.rank = rank(double(c.eval->retained_genuine), c.eval->fnmr_total_mean,
                  tree.baseline.fnmr_total_mean, c.eval->igarbe_mean,
                  tree.baseline.igarbe_mean, config.ranking);
    survivors.push_back(std::move(c));
  }
  std::sort(survivors.begin(), survivors.end(), [](const Candidate& a, const Candidate& b) {
    if (a.rank.r_total != b.rank.r_total) return a.rank.r_total > b.rank.r_total;
    return a.encoding < b.encoding;
  });
  if (survivors.size() > std::size_t(config.branching)) {
    survivors.resize(std::size_t(config.branching));
  }

  for (const auto& c : survivors) {
    SearchNode child;
    child.parent = std::int64_t(node_index);
    child.depth = tree.nodes[node_index].depth + 1;
    child.assignment = c.assignment;
    child.eval = c.eval;
    child.rank = c.rank;
    tree.nodes[node_index].children.push_back(std::uint32_t(tree.nodes.size()));
    tree.nodes.push_back(std::move(child));
  }
}

SearchTree run_search(const Dataset& data, const ClusterModel& model,
                      const SearchConfig& config, const EvalResult& baseline,
                      EvalCache* cache) {
  if (config.d_max < 0) throw ValidationError("run_search: d_max must be >= 0");
  if (config.branching < 1) throw ValidationError("run_search: branching must be >= 1");

  SearchTree tree;
  tree.baseline = baseline;
  tree.nodes.push_back(SearchNode{});

  const auto candidates = all_assignments(model);
  for (int depth = 0; depth <= config.d_max; ++depth) {
    std::vector<std::size_t> level;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      if (tree.nodes[i].depth == depth) level.push_back(i);
    }
    for (const std::size_t node : level) {
      expand_node(tree, node, candidates, data, model, config, cache);
    }
  }
  return tree;
}

std::vector<CombinationRow> top_combinations(const SearchTree& tree,
                                             const ClusterModel& model, std::size_t k,
                                             const FairnessDistribution* dist) {
  std::map<std::string, CombinationRow> unique;
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const auto combo = tree.branch_to(i);
    CombinationRow row;
    row.encoding = canonical_encoding(combo, model);
    if (unique.count(row.encoding) != 0) continue;
    row.combo = combo;
    row.assignments = combo.size();
    row.eval = *tree.nodes[i].eval;
    row.rank = *tree.nodes[i].rank;
    if (dist != nullptr) {
      row.cofair = cofair(*dist, row.eval.igarbe_mean);
      row.has_cofair = true;
    }
    unique.emplace(row.encoding, std::move(row));
  }

  std::vector<CombinationRow> rows;
  rows.reserve(unique.size());
  for (auto& [_, row] : unique) rows.push_back(std::move(row));
  std::sort(rows.begin(), rows.end(), [](const CombinationRow& a, const CombinationRow& b) {
    if (a.eval.igarbe_mean != b.eval.igarbe_mean) {
      return a.eval.igarbe_mean > b.eval.igarbe_mean;
    }
    if (a.assignments != b.assignments) return a.assignments < b.assignments;
    return a.encoding < b.encoding;
  });
  if (rows.size() > k) rows.resize(k);
  return rows;
}

std::vector<AttributeLabelDistribution> assignment_distribution(
    const Dataset& data, const ClusterModel& model, const AssignmentCombination& combo) {
  validate_combination(combo, model);
  const auto mask = template_mask(*data.table, model, combo);
  const AnnotationTable& table = *data.table;

  std::size_t survivors = 0;
  for (const std::uint8_t m : mask) survivors += m;
  if (survivors == 0) {
    throw ValidationError("assignment_distribution: no template survives the filter");
  }

  const std::size_t k = table.attribute_count();
  std::vector<std::uint8_t> excluded(k, 0);
  std::vector<std::uint8_t> inverted(k, 0);
  for (const auto& a : combo.assignments) {
    for (const std::uint32_t attr : model.clusters[a.cluster].members) excluded[attr] = 1;
  }
  for (const auto& c : model.clusters) {
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      inverted[c.members[i]] = c.inverted[i];
    }
  }

  std::vector<AttributeLabelDistribution> out;
  for (std::size_t a = 0; a < k; ++a) {
    if (excluded[a]) continue;
    std::array<std::uint64_t, 3> counts{};  // -1, 0, +1
    for (std::size_t r = 0; r < table.size(); ++r) {
      if (!mask[r]) continue;
      int v = table.label(r, a);
      if (inverted[a]) v = -v;
      ++counts[std::size_t(v + 1)];
    }
    AttributeLabelDistribution d;
    d.attribute = cluster_member_name(table.attribute_names[a], inverted[a] != 0);
    for (int l = 0; l < 3; ++l) {
      d.freq[std::size_t(l)] = double(counts[std::size_t(l)]) / double(survivors);
      if (d.freq[std::size_t(l)] >= 0.9) d.strong_label = l - 1;
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace fairprobe
