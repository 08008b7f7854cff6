#include "fairprobe/config.hpp"

#include <cmath>
#include <fstream>

namespace fairprobe {

SyntheticConfig synthetic_from_json(const nlohmann::json& j) {
  SyntheticConfig c;
  c.identities_per_gender = j.value("identities_per_gender", c.identities_per_gender);
  c.images_per_identity = j.value("images_per_identity", c.images_per_identity);
  if (j.contains("attributes")) {
    const auto& a = j.at("attributes");
    if (a.is_number_unsigned()) {
      c.attribute_names.assign(a.get<std::size_t>(), std::string());
    } else {
      c.attribute_names = a.get<std::vector<std::string>>();
    }
  }
  c.p_positive = j.value("p_positive", c.p_positive);
  c.p_zero = j.value("p_zero", c.p_zero);
  if (j.contains("groups")) {
    for (const auto& jg : j.at("groups")) {
      CorrelatedGroup g;
      g.members = jg.at("members").get<std::vector<std::uint32_t>>();
      g.rho = jg.at("rho").get<double>();
      g.negate_first = jg.value("negate_first", false);
      c.groups.push_back(std::move(g));
    }
  }
  if (j.contains("rules")) {
    for (const auto& jr : j.at("rules")) {
      PlantedRule r;
      r.attribute = jr.at("attribute").get<std::uint32_t>();
      r.label = jr.at("label").get<int>();
      const std::string g = jr.value("gender", "F");
      if (g != "M" && g != "F") {
        throw ValidationError("synthetic rule gender must be M or F");
      }
      r.gender = g == "M" ? Gender::Male : Gender::Female;
      r.delta = jr.at("delta").get<double>();
      r.prevalence_biased = jr.value("prevalence_biased", r.prevalence_biased);
      r.prevalence_other = jr.value("prevalence_other", r.prevalence_other);
      c.rules.push_back(r);
    }
  }
  c.genuine_mu = j.value("genuine_mu", c.genuine_mu);
  c.genuine_sigma = j.value("genuine_sigma", c.genuine_sigma);
  c.impostor_mu = j.value("impostor_mu", c.impostor_mu);
  c.impostor_sigma = j.value("impostor_sigma", c.impostor_sigma);
  c.impostor_per_genuine = j.value("impostor_per_genuine", c.impostor_per_genuine);
  c.seed = j.value("seed", c.seed);
  return c;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.annotations = j.value("annotations", "");
  c.comparisons = j.value("comparisons", "");
  c.embeddings = j.value("embeddings", "");
  c.cluster_model = j.value("cluster_model", "");
  c.cluster_aliases = j.value("cluster_aliases", "");
  c.distribution = j.value("distribution", "");
  c.out_dir = j.value("out_dir", c.out_dir);

  c.op.fmr_target = j.value("fmr", c.op.fmr_target);
  c.op.alpha = j.value("alpha", c.op.alpha);
  c.sampling.rho_s = j.value("rho_s", c.sampling.rho_s);
  c.sampling.gamma = j.value("gamma", c.sampling.gamma);
  if (j.contains("lambda_g")) {
    c.sampling.lambda_g = j.at("lambda_g").get<std::uint64_t>();
    c.lambda_g_set = true;
  }
  c.ranking.mu = j.value("mu", c.ranking.mu);
  c.ranking.lambda = j.value("lambda", c.ranking.lambda);
  c.ranking.omega = j.value("omega", c.ranking.omega);
  c.branching = j.value("branching", c.branching);
  c.d_max = j.value("d_max", c.d_max);
  c.parent_relative_gate = j.value("parent_relative_gate", false);
  c.imax = j.value("imax", c.imax);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.use_cache = j.value("cache", c.use_cache);
  c.top_k = j.value("top_k", c.top_k);

  if (j.contains("synth")) {
    c.synth = synthetic_from_json(j.at("synth"));
    c.has_synth = true;
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  return run_config_from_json(j);
}

void RunConfig::resolve_defaults() {
  if (!(op.fmr_target > 0.0 && op.fmr_target < 1.0)) {
    throw ValidationError("config: fmr must be in (0,1)");
  }
  if (!lambda_g_set) {
    sampling.lambda_g = std::uint64_t(std::llround(1.0 / op.fmr_target));
  }
  ranking.fmr = op.fmr_target;
  if (branching < 1) throw ValidationError("config: branching must be >= 1");
  if (d_max < 0) throw ValidationError("config: d_max must be >= 0");
}

EqualizeParams RunConfig::equalize_params() const {
  EqualizeParams p;
  p.sampling = sampling;
  p.op = op;
  p.seed = seed;
  return p;
}

SearchConfig RunConfig::search_config() const {
  SearchConfig s;
  s.d_max = d_max;
  s.branching = branching;
  s.parent_relative_gate = parent_relative_gate;
  s.eq = equalize_params();
  s.ranking = ranking;
  return s;
}

}  // namespace fairprobe
