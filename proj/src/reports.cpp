#include "fairprobe/reports.hpp"

#include <cstdio>
#include <fstream>

namespace fairprobe {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::out | std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

nlohmann::ordered_json eval_to_json(const EvalResult& e) {
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

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out = open_out(path);
  out << contents;
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

void write_correlation_csv(const CorrelationMatrix& m, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "attribute";
  for (const auto& n : m.names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << m.names[i];
    for (std::size_t j = 0; j < m.size(); ++j) out << ',' << fmt6(m.at(i, j));
    out << '\n';
  }
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

nlohmann::ordered_json model_to_json(const ClusterModel& model) {
  nlohmann::ordered_json j;
  j["iteration"] = model.iteration;
  auto& clusters = j["clusters"] = nlohmann::ordered_json::array();
  for (const auto& c : model.clusters) {
    nlohmann::ordered_json jc;
    jc["name"] = c.display_name;
    auto& members = jc["members"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      members.push_back(nlohmann::ordered_json{
          {"attribute", model.attribute_names[c.members[i]]},
          {"inverted", c.inverted[i] != 0}});
    }
    clusters.push_back(std::move(jc));
  }
  auto& diags = j["diagnostics"] = nlohmann::ordered_json::array();
  for (const auto& d : model.diagnostics) {
    diags.push_back(nlohmann::ordered_json{{"iteration", d.iteration},
                                           {"clusters", d.cluster_count},
                                           {"mean_abs_r", d.mean_abs_r},
                                           {"std_abs_r", d.std_abs_r},
                                           {"max_abs_r", d.max_abs_r},
                                           {"sampling_valid", d.sampling_valid}});
  }
  return j;
}

ClusterModel model_from_json(const nlohmann::json& j, const AnnotationTable& table) {
  ClusterModel model;
  model.attribute_names = table.attribute_names;
  model.iteration = j.at("iteration").get<int>();

  std::map<std::string, std::uint32_t> attr_index;
  for (std::size_t a = 0; a < table.attribute_names.size(); ++a) {
    attr_index[table.attribute_names[a]] = std::uint32_t(a);
  }

  std::vector<std::uint8_t> seen(table.attribute_names.size(), 0);
  for (const auto& jc : j.at("clusters")) {
    Cluster c;
    c.display_name = jc.at("name").get<std::string>();
    for (const auto& jm : jc.at("members")) {
      const std::string name = jm.at("attribute").get<std::string>();
      const auto it = attr_index.find(name);
      if (it == attr_index.end()) {
        throw ValidationError("cluster model references unknown attribute '" + name + "'");
      }
      if (seen[it->second]) {
        throw ValidationError("cluster model lists attribute '" + name + "' twice");
      }
      seen[it->second] = 1;
      c.members.push_back(it->second);
      c.inverted.push_back(jm.at("inverted").get<bool>() ? 1 : 0);
    }
    if (c.members.empty()) throw ValidationError("cluster model has an empty cluster");
    model.clusters.push_back(std::move(c));
  }
  for (std::size_t a = 0; a < seen.size(); ++a) {
    if (!seen[a]) {
      throw ValidationError("cluster model misses attribute '" +
                            table.attribute_names[a] + "'");
    }
  }

  if (j.contains("diagnostics")) {
    for (const auto& jd : j.at("diagnostics")) {
      IterationDiagnostics d;
      d.iteration = jd.at("iteration").get<int>();
      d.cluster_count = jd.at("clusters").get<std::size_t>();
      d.mean_abs_r = jd.at("mean_abs_r").get<double>();
      d.std_abs_r = jd.at("std_abs_r").get<double>();
      d.max_abs_r = jd.at("max_abs_r").get<double>();
      d.sampling_valid = jd.at("sampling_valid").get<bool>();
      model.diagnostics.push_back(d);
    }
  }
  return model;
}

void write_diagnostics_csv(const ClusterModel& model, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "iteration,clusters,mean_abs_r,std_abs_r,max_abs_r,sampling_valid\n";
  for (const auto& d : model.diagnostics) {
    out << d.iteration << ',' << d.cluster_count << ',' << fmt6(d.mean_abs_r) << ','
        << fmt6(d.std_abs_r) << ',' << fmt6(d.max_abs_r) << ','
        << (d.sampling_valid ? 1 : 0) << '\n';
  }
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

void apply_cluster_aliases(ClusterModel& model,
                           const std::map<std::string, std::string>& aliases) {
  for (auto& c : model.clusters) {
    const auto it = aliases.find(c.display_name);
    if (it != aliases.end()) c.display_name = it->second;
  }
}

namespace {

constexpr const char* kSinglesHeader =
    "combination,igarbe_mean,igarbe_std,fnmr_male,fnmr_female,fnmr_total_mean,"
    "fmr_male,fmr_female,cofair,threshold_mean,retained_genuine,repetitions";

void write_audit_row(std::ofstream& out, const AuditRow& row) {
  const EvalResult& e = row.eval;
  out << row.encoding << ',' << fmt6(e.igarbe_mean) << ',' << fmt6(e.igarbe_std) << ','
      << fmt6(e.per_group[0].fnmr) << ',' << fmt6(e.per_group[1].fnmr) << ','
      << fmt6(e.fnmr_total_mean) << ',' << fmt6(e.per_group[0].fmr) << ','
      << fmt6(e.per_group[1].fmr) << ',' << (row.has_cofair ? fmt6(row.cofair) : "") << ','
      << fmt6(e.threshold_mean) << ',' << e.retained_genuine << ',' << e.repetitions
      << '\n';
}

}  // namespace

void write_singles_csv(const std::vector<AuditRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << kSinglesHeader << '\n';
  for (const auto& row : rows) write_audit_row(out, row);
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

nlohmann::ordered_json singles_to_json(const std::vector<AuditRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["combination"] = row.encoding;
    j["metrics"] = eval_to_json(row.eval);
    if (row.has_cofair) j["cofair"] = row.cofair;
    arr.push_back(std::move(j));
  }
  return arr;
}

nlohmann::ordered_json distribution_to_json(const FairnessDistribution& dist) {
  return nlohmann::ordered_json{{"samples", dist.samples}, {"bandwidth", dist.bandwidth}};
}

FairnessDistribution distribution_from_json(const nlohmann::json& j) {
  FairnessDistribution dist;
  dist.samples = j.at("samples").get<std::vector<double>>();
  dist.bandwidth = j.at("bandwidth").get<double>();
  if (dist.samples.empty() || !(dist.bandwidth > 0.0)) {
    throw ValidationError("fairness distribution file is degenerate");
  }
  return dist;
}

void write_density_csv(const FairnessDistribution& dist, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "score,density\n";
  for (int i = 0; i <= 1000; ++i) {
    const double s = double(i) / 1000.0;
    out << fmt6(s) << ',' << fmt6(kde_density(dist, s)) << '\n';
  }
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

namespace {

constexpr const char* kCombinationsHeader =
    "combination,assignments,igarbe_mean,igarbe_std,fnmr_male,fnmr_female,"
    "fnmr_total_mean,cofair,retained_genuine,r_total,r_s,r_p,r_f";

}  // namespace

void write_combinations_csv(const AuditRow& baseline,
                            const std::vector<CombinationRow>& rows,
                            const std::string& path) {
  std::ofstream out = open_out(path);
  out << kCombinationsHeader << '\n';
  const EvalResult& b = baseline.eval;
  out << baseline.encoding << ",0," << fmt6(b.igarbe_mean) << ',' << fmt6(b.igarbe_std)
      << ',' << fmt6(b.per_group[0].fnmr) << ',' << fmt6(b.per_group[1].fnmr) << ','
      << fmt6(b.fnmr_total_mean) << ','
      << (baseline.has_cofair ? fmt6(baseline.cofair) : "") << ',' << b.retained_genuine
      << ",,,,\n";
  for (const auto& row : rows) {
    const EvalResult& e = row.eval;
    out << row.encoding << ',' << row.assignments << ',' << fmt6(e.igarbe_mean) << ','
        << fmt6(e.igarbe_std) << ',' << fmt6(e.per_group[0].fnmr) << ','
        << fmt6(e.per_group[1].fnmr) << ',' << fmt6(e.fnmr_total_mean) << ','
        << (row.has_cofair ? fmt6(row.cofair) : "") << ',' << e.retained_genuine << ','
        << fmt6(row.rank.r_total) << ',' << fmt6(row.rank.r_s) << ','
        << fmt6(row.rank.r_p) << ',' << fmt6(row.rank.r_f) << '\n';
  }
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

nlohmann::ordered_json combinations_to_json(const AuditRow& baseline,
                                            const std::vector<CombinationRow>& rows) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json jb;
  jb["combination"] = baseline.encoding;
  jb["metrics"] = eval_to_json(baseline.eval);
  if (baseline.has_cofair) jb["cofair"] = baseline.cofair;
  j["baseline"] = std::move(jb);
  auto& arr = j["combinations"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json jr;
    jr["combination"] = row.encoding;
    jr["assignments"] = row.assignments;
    jr["metrics"] = eval_to_json(row.eval);
    if (row.has_cofair) jr["cofair"] = row.cofair;
    jr["rank"] = nlohmann::ordered_json{{"r_total", row.rank.r_total},
                                        {"r_s", row.rank.r_s},
                                        {"r_p", row.rank.r_p},
                                        {"r_f", row.rank.r_f}};
    arr.push_back(std::move(jr));
  }
  return j;
}

namespace {

nlohmann::ordered_json node_to_json(const SearchTree& tree, const ClusterModel& model,
                                    std::size_t index) {
  const SearchNode& n = tree.nodes[index];
  nlohmann::ordered_json j;
  j["depth"] = n.depth;
  if (n.assignment) {
    j["assignment"] = model.clusters[n.assignment->cluster].display_name +
                      (n.assignment->label > 0 ? "=+1" : "=-1");
  }
  if (n.eval) j["metrics"] = eval_to_json(*n.eval);
  if (n.rank) {
    j["rank"] = nlohmann::ordered_json{{"r_total", n.rank->r_total},
                                       {"r_s", n.rank->r_s},
                                       {"r_p", n.rank->r_p},
                                       {"r_f", n.rank->r_f}};
  }
  auto& children = j["children"] = nlohmann::ordered_json::array();
  for (const std::uint32_t c : n.children) children.push_back(node_to_json(tree, model, c));
  return j;
}

}  // namespace

nlohmann::ordered_json tree_to_json(const SearchTree& tree, const ClusterModel& model) {
  nlohmann::ordered_json j;
  j["baseline"] = eval_to_json(tree.baseline);
  j["root"] = node_to_json(tree, model, 0);
  return j;
}

void write_assignment_distribution_csv(
    const std::vector<AttributeLabelDistribution>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "attribute,freq_negative,freq_unclear,freq_positive,strong_label\n";
  for (const auto& r : rows) {
    out << r.attribute << ',' << fmt6(r.freq[0]) << ',' << fmt6(r.freq[1]) << ','
        << fmt6(r.freq[2]) << ',';
    if (r.strong_label) out << *r.strong_label;
    out << '\n';
  }
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

}  // namespace fairprobe
