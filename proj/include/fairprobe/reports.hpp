#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairprobe/cofair.hpp"
#include "fairprobe/decorrelate.hpp"
#include "fairprobe/search.hpp"

namespace fairprobe {

// Fixed-precision rendering keeps report bytes reproducible.
std::string fmt6(double v);

nlohmann::ordered_json eval_to_json(const EvalResult& e);

struct AuditRow {
  std::string encoding;  // empty for the baseline row
  EvalResult eval;
  double cofair = 0.0;
  bool has_cofair = false;
};

void write_correlation_csv(const CorrelationMatrix& m, const std::string& path);

nlohmann::ordered_json model_to_json(const ClusterModel& model);
ClusterModel model_from_json(const nlohmann::json& j, const AnnotationTable& table);
void write_diagnostics_csv(const ClusterModel& model, const std::string& path);

// Optional curated titles for multi-member clusters, keyed by the default
// joined name.
void apply_cluster_aliases(ClusterModel& model,
                           const std::map<std::string, std::string>& aliases);

void write_singles_csv(const std::vector<AuditRow>& rows, const std::string& path);
nlohmann::ordered_json singles_to_json(const std::vector<AuditRow>& rows);

nlohmann::ordered_json distribution_to_json(const FairnessDistribution& dist);
FairnessDistribution distribution_from_json(const nlohmann::json& j);
// Density curve over [0,1] at step 0.001: `score,density`.
void write_density_csv(const FairnessDistribution& dist, const std::string& path);

void write_combinations_csv(const AuditRow& baseline,
                            const std::vector<CombinationRow>& rows,
                            const std::string& path);
nlohmann::ordered_json combinations_to_json(const AuditRow& baseline,
                                            const std::vector<CombinationRow>& rows);

nlohmann::ordered_json tree_to_json(const SearchTree& tree, const ClusterModel& model);

void write_assignment_distribution_csv(
    const std::vector<AttributeLabelDistribution>& rows, const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace fairprobe
