#pragma once

#include <string>

#include <json.hpp>

#include "fairprobe/equalize.hpp"
#include "fairprobe/ranking.hpp"
#include "fairprobe/search.hpp"
#include "fairprobe/synthetic.hpp"

namespace fairprobe {

struct RunConfig {
  std::string annotations;
  std::string comparisons;
  std::string embeddings;
  std::string cluster_model;  // optional precomputed model JSON
  std::string cluster_aliases;  // optional display-name map for clusters
  std::string distribution;   // optional fitted distribution JSON
  std::string out_dir = ".";

  OperatingPoint op;             // fmr, alpha
  SampleParams sampling;         // rho_s, gamma, lambda_g (0 -> 1/fmr)
  RankingParams ranking;         // mu, lambda, omega, fmr
  int branching = 3;
  int d_max = 3;
  bool parent_relative_gate = false;
  int imax = -1;  // -1 = auto-select
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware default
  bool use_cache = true;
  std::size_t top_k = 10;

  SyntheticConfig synth;
  bool has_synth = false;

  bool lambda_g_set = false;

  // lambda_g defaults to 1/FMR and the ranking FMR follows the operating
  // point unless explicitly configured.
  void resolve_defaults();

  EqualizeParams equalize_params() const;
  SearchConfig search_config() const;
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json(const nlohmann::json& j);
SyntheticConfig synthetic_from_json(const nlohmann::json& j);

}  // namespace fairprobe
