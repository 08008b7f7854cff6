// fairprobe — command-line front end for the fairness-audit pipeline:
// synthetic data, attribute correlation, decorrelation clustering,
// single-assignment audits, and the combination search.

#include <cstdlib>
#include <map>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairprobe/compare.hpp"
#include "fairprobe/config.hpp"
#include "fairprobe/io.hpp"
#include "fairprobe/parallel.hpp"
#include "fairprobe/reports.hpp"

namespace fp = fairprobe;

namespace {

struct CliOverrides {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double fmr = 0.0;
  bool fmr_set = false;
  int d_max = 0;
  bool d_max_set = false;
  int branching = 0;
  bool branching_set = false;
  int imax = -1;
  bool imax_set = false;
  std::string out_dir;
  unsigned threads = 0;
  bool threads_set = false;
  bool no_cache = false;
};

void add_common_options(CLI::App* cmd, CliOverrides* ov) {
  cmd->add_option("-c,--config", ov->config_path, "run configuration JSON")->required();
  cmd->add_option("--seed", ov->seed, "master seed (overrides config)")
      ->each([ov](const std::string&) { ov->seed_set = true; });
  cmd->add_option("--fmr", ov->fmr, "FMR operating point (overrides config)")
      ->each([ov](const std::string&) { ov->fmr_set = true; });
  cmd->add_option("--d-max", ov->d_max, "search depth limit")
      ->each([ov](const std::string&) { ov->d_max_set = true; });
  cmd->add_option("--branching", ov->branching, "assignments kept per node")
      ->each([ov](const std::string&) { ov->branching_set = true; });
  cmd->add_option("--imax", ov->imax, "fixed clustering iteration (-1 = auto)")
      ->each([ov](const std::string&) { ov->imax_set = true; });
  cmd->add_option("--out", ov->out_dir, "output directory (overrides config)");
  cmd->add_option("--threads", ov->threads, "worker threads (0 = hardware)")
      ->each([ov](const std::string&) { ov->threads_set = true; });
  cmd->add_flag("--no-cache", ov->no_cache, "disable the evaluation cache");
}

fp::RunConfig resolve_config(const CliOverrides& ov) {
  fp::RunConfig cfg = fp::load_run_config(ov.config_path);
  // precedence: flag > config file > environment > default
  if (const char* env = std::getenv("FAIRPROBE_SEED"); env != nullptr && cfg.seed == 0) {
    cfg.seed = std::strtoull(env, nullptr, 10);
  }
  if (ov.seed_set) cfg.seed = ov.seed;
  if (ov.fmr_set) cfg.op.fmr_target = ov.fmr;
  if (ov.d_max_set) cfg.d_max = ov.d_max;
  if (ov.branching_set) cfg.branching = ov.branching;
  if (ov.imax_set) cfg.imax = ov.imax;
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (ov.threads_set) cfg.threads = ov.threads;
  if (ov.no_cache) cfg.use_cache = false;
  cfg.resolve_defaults();

  fp::set_thread_count(cfg.threads);
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

std::string out_path(const fp::RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

struct LoadedData {
  fp::AnnotationTable table;
  fp::ComparisonStore store;
  fp::Dataset dataset;
};

LoadedData load_dataset(const fp::RunConfig& cfg) {
  if (cfg.annotations.empty()) throw fp::ValidationError("config: annotations path missing");
  LoadedData d;
  d.table = fp::load_annotations(cfg.annotations);
  if (!cfg.embeddings.empty()) fp::load_embeddings(d.table, cfg.embeddings);
  if (!cfg.comparisons.empty()) {
    d.store = fp::load_comparisons(cfg.comparisons);
  } else if (d.table.has_embeddings()) {
    fp::ComparisonPolicy policy;
    policy.seed = cfg.seed;
    d.store = fp::generate_comparisons(d.table, policy);
  } else {
    throw fp::ValidationError("config: need either comparisons or embeddings");
  }
  d.dataset = fp::Dataset::link(d.table, d.store);
  return d;
}

fp::ClusterModel obtain_model(const fp::RunConfig& cfg, const LoadedData& data) {
  fp::ClusterModel model;
  if (!cfg.cluster_model.empty()) {
    std::ifstream in(cfg.cluster_model);
    if (!in) throw fp::ValidationError("cannot open cluster model '" + cfg.cluster_model + "'");
    nlohmann::json j;
    in >> j;
    model = fp::model_from_json(j, data.table);
  } else {
    const auto probe = fp::make_sampling_probe(data.dataset, cfg.sampling);
    model = cfg.imax >= 0 ? fp::cluster_at_iteration(data.table, cfg.imax, &probe)
                          : fp::select_imax(data.table, probe);
  }
  if (!cfg.cluster_aliases.empty()) {
    std::ifstream in(cfg.cluster_aliases);
    if (!in) throw fp::ValidationError("cannot open alias map '" + cfg.cluster_aliases + "'");
    nlohmann::json j;
    in >> j;
    std::map<std::string, std::string> aliases;
    for (const auto& [key, value] : j.items()) aliases[key] = value.get<std::string>();
    fp::apply_cluster_aliases(model, aliases);
  }
  return model;
}

struct AuditOutput {
  fp::AuditRow baseline;
  std::vector<fp::AuditRow> singles;  // rows that passed the sampling guards
  fp::FairnessDistribution dist;
};

AuditOutput run_audit(const fp::RunConfig& cfg, const LoadedData& data,
                      const fp::ClusterModel& model, fp::EvalCache* cache) {
  const auto params = cfg.equalize_params();
  AuditOutput out;
  out.baseline.encoding = "";
  out.baseline.eval = fp::compute_baseline(data.dataset, model, params);

  for (const auto& assignment : fp::all_assignments(model)) {
    fp::AssignmentCombination combo;
    combo.assignments.push_back(assignment);
    const std::string encoding = fp::canonical_encoding(combo, model);
    std::optional<fp::EvalResult> eval;
    const std::string key =
        fp::EvalCache::key(encoding, data.store.dataset_fingerprint);
    if (cache == nullptr || !cache->lookup(key, &eval)) {
      eval = fp::equalize(data.dataset, model, combo, params);
      if (cache != nullptr) cache->store(key, eval);
    }
    if (!eval) continue;  // assignments failing the sampling guards are left out
    out.singles.push_back(fp::AuditRow{encoding, *eval, 0.0, false});
  }
  std::sort(out.singles.begin(), out.singles.end(),
            [](const fp::AuditRow& a, const fp::AuditRow& b) {
              return a.encoding < b.encoding;
            });

  std::vector<std::pair<double, double>> points;
  points.reserve(out.singles.size());
  for (const auto& row : out.singles) {
    points.emplace_back(row.eval.igarbe_mean, row.eval.fnmr_total_mean);
  }
  out.dist = fp::fit_distribution(points, out.baseline.eval.fnmr_total_mean);

  out.baseline.cofair = fp::cofair(out.dist, out.baseline.eval.igarbe_mean);
  out.baseline.has_cofair = true;
  for (auto& row : out.singles) {
    row.cofair = fp::cofair(out.dist, row.eval.igarbe_mean);
    row.has_cofair = true;
  }
  return out;
}

int cmd_synth(const CliOverrides& ov) {
  const fp::RunConfig cfg = resolve_config(ov);
  if (!cfg.has_synth) throw fp::ValidationError("config: synth block missing");
  fp::SyntheticConfig synth = cfg.synth;
  // --seed wins; otherwise an unseeded synth block falls back to the run
  // seed (which itself may come from FAIRPROBE_SEED)
  if (ov.seed_set || synth.seed == 0) synth.seed = cfg.seed;
  auto [table, store] = fp::generate(synth);
  fp::save_annotations(table, out_path(cfg, "annotations.csv"));
  fp::save_comparisons(store, out_path(cfg, "comparisons.fpcm"));
  std::cout << "templates=" << table.size() << " comparisons=" << store.size()
            << " fingerprint=" << store.dataset_fingerprint << "\n";
  return 0;
}

int cmd_correlate(const CliOverrides& ov) {
  const fp::RunConfig cfg = resolve_config(ov);
  if (cfg.annotations.empty()) throw fp::ValidationError("config: annotations path missing");
  const auto table = fp::load_annotations(cfg.annotations);
  const auto matrix = fp::pearson_matrix(table);
  fp::write_correlation_csv(matrix, out_path(cfg, "correlation.csv"));
  std::cout << "attributes=" << matrix.size() << "\n";
  return 0;
}

int cmd_decorrelate(const CliOverrides& ov) {
  const fp::RunConfig cfg = resolve_config(ov);
  const LoadedData data = load_dataset(cfg);
  const auto probe = fp::make_sampling_probe(data.dataset, cfg.sampling);
  const fp::ClusterModel model = cfg.imax >= 0
                                     ? fp::cluster_at_iteration(data.table, cfg.imax, &probe)
                                     : fp::select_imax(data.table, probe);
  fp::write_text_file(out_path(cfg, "clusters.json"), fp::model_to_json(model).dump(2) + "\n");
  fp::write_diagnostics_csv(model, out_path(cfg, "cluster_diagnostics.csv"));
  std::cout << "iteration=" << model.iteration << " clusters=" << model.clusters.size()
            << "\n";
  return 0;
}

int cmd_audit_singles(const CliOverrides& ov) {
  const fp::RunConfig cfg = resolve_config(ov);
  const LoadedData data = load_dataset(cfg);
  const fp::ClusterModel model = obtain_model(cfg, data);

  fp::EvalCache cache;
  const std::string cache_path = out_path(cfg, "eval_cache.jsonl");
  if (cfg.use_cache) cache.load_jsonl(cache_path);

  const AuditOutput audit =
      run_audit(cfg, data, model, cfg.use_cache ? &cache : nullptr);

  std::vector<fp::AuditRow> rows;
  rows.push_back(audit.baseline);
  rows.insert(rows.end(), audit.singles.begin(), audit.singles.end());
  fp::write_singles_csv(rows, out_path(cfg, "singles.csv"));
  fp::write_text_file(out_path(cfg, "singles.json"),
                      fp::singles_to_json(rows).dump(2) + "\n");
  fp::write_text_file(out_path(cfg, "fairness_distribution.json"),
                      fp::distribution_to_json(audit.dist).dump(2) + "\n");
  fp::write_density_csv(audit.dist, out_path(cfg, "fairness_density.csv"));
  if (cfg.use_cache) cache.save_jsonl(cache_path);
  std::cout << "singles=" << audit.singles.size()
            << " kde_samples=" << audit.dist.samples.size() << "\n";
  return 0;
}

int cmd_search(const CliOverrides& ov) {
  const fp::RunConfig cfg = resolve_config(ov);
  const LoadedData data = load_dataset(cfg);
  const fp::ClusterModel model = obtain_model(cfg, data);

  fp::EvalCache cache;
  const std::string cache_path = out_path(cfg, "eval_cache.jsonl");
  if (cfg.use_cache) cache.load_jsonl(cache_path);
  fp::EvalCache* cache_ptr = cfg.use_cache ? &cache : nullptr;

  fp::FairnessDistribution dist;
  fp::AuditRow baseline_row;
  if (!cfg.distribution.empty()) {
    std::ifstream in(cfg.distribution);
    if (!in) throw fp::ValidationError("cannot open distribution '" + cfg.distribution + "'");
    nlohmann::json j;
    in >> j;
    dist = fp::distribution_from_json(j);
    baseline_row.eval = fp::compute_baseline(data.dataset, model, cfg.equalize_params());
  } else {
    const AuditOutput audit = run_audit(cfg, data, model, cache_ptr);
    dist = audit.dist;
    baseline_row.eval = audit.baseline.eval;
  }
  baseline_row.encoding = "";
  baseline_row.cofair = fp::cofair(dist, baseline_row.eval.igarbe_mean);
  baseline_row.has_cofair = true;

  const fp::SearchTree tree =
      fp::run_search(data.dataset, model, cfg.search_config(), baseline_row.eval, cache_ptr);
  const auto rows = fp::top_combinations(tree, model, cfg.top_k, &dist);

  fp::write_combinations_csv(baseline_row, rows, out_path(cfg, "combinations.csv"));
  fp::write_text_file(out_path(cfg, "combinations.json"),
                      fp::combinations_to_json(baseline_row, rows).dump(2) + "\n");
  fp::write_text_file(out_path(cfg, "search_tree.json"),
                      fp::tree_to_json(tree, model).dump(2) + "\n");
  if (!rows.empty()) {
    const auto distribution =
        fp::assignment_distribution(data.dataset, model, rows.front().combo);
    fp::write_assignment_distribution_csv(
        distribution, out_path(cfg, "top_assignment_distribution.csv"));
  }
  if (cfg.use_cache) cache.save_jsonl(cache_path);
  std::cout << "combinations=" << rows.size() << " nodes=" << tree.nodes.size()
            << " cache_hits=" << cache.hits() << "\n";
  return 0;
}

int cmd_cofair(const CliOverrides& ov, double score, bool score_set,
               const std::string& density_out) {
  const fp::RunConfig cfg = resolve_config(ov);
  if (cfg.distribution.empty()) {
    throw fp::ValidationError("config: distribution path missing for cofair");
  }
  std::ifstream in(cfg.distribution);
  if (!in) throw fp::ValidationError("cannot open distribution '" + cfg.distribution + "'");
  nlohmann::json j;
  in >> j;
  const auto dist = fp::distribution_from_json(j);
  if (score_set) {
    std::cout << fp::fmt6(fp::cofair(dist, score)) << "\n";
  }
  if (!density_out.empty()) fp::write_density_csv(dist, density_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairness audit toolchain for biometric verification"};
  app.require_subcommand(1);

  CliOverrides ov_synth, ov_corr, ov_decorr, ov_audit, ov_search, ov_cofair;
  add_common_options(app.add_subcommand("synth", "generate a synthetic dataset"),
                     &ov_synth);
  add_common_options(
      app.add_subcommand("correlate", "export the attribute correlation matrix"),
      &ov_corr);
  add_common_options(
      app.add_subcommand("decorrelate", "cluster correlated attributes"), &ov_decorr);
  add_common_options(
      app.add_subcommand("audit-singles",
                         "evaluate every single assignment and fit the score "
                         "distribution"),
      &ov_audit);
  add_common_options(app.add_subcommand("search", "run the combination search"),
                     &ov_search);
  auto* cofair_cmd =
      app.add_subcommand("cofair", "evaluate the contextualized fairness of a score");
  add_common_options(cofair_cmd, &ov_cofair);
  double cofair_score = 0.0;
  const auto score_opt = cofair_cmd->add_option("--score", cofair_score, "score to evaluate");
  std::string density_out;
  cofair_cmd->add_option("--density", density_out, "write the density curve CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("synth")) return cmd_synth(ov_synth);
    if (app.got_subcommand("correlate")) return cmd_correlate(ov_corr);
    if (app.got_subcommand("decorrelate")) return cmd_decorrelate(ov_decorr);
    if (app.got_subcommand("audit-singles")) return cmd_audit_singles(ov_audit);
    if (app.got_subcommand("search")) return cmd_search(ov_search);
    if (app.got_subcommand("cofair")) {
      return cmd_cofair(ov_cofair, cofair_score, score_opt->count() > 0, density_out);
    }
  } catch (const fp::InsufficientSamplesError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
