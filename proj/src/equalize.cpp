#include "fairprobe/equalize.hpp"

#include <algorithm>
#include <cmath>

#include "fairprobe/parallel.hpp"
#include "fairprobe/rng.hpp"

namespace fairprobe {

bool AssignmentCombination::uses_cluster(std::uint32_t cluster) const {
  for (const auto& a : assignments) {
    if (a.cluster == cluster) return true;
  }
  return false;
}

AssignmentCombination AssignmentCombination::extended(const Assignment& a) const {
  AssignmentCombination out = *this;
  out.assignments.push_back(a);
  return out;
}

void validate_combination(const AssignmentCombination& combo, const ClusterModel& model) {
  for (const auto& a : combo.assignments) {
    if (a.cluster >= model.clusters.size()) {
      throw ValidationError("combination references cluster " + std::to_string(a.cluster) +
                            " of " + std::to_string(model.clusters.size()));
    }
    if (a.label != 1 && a.label != -1) {
      throw ValidationError("combination labels must be +1 or -1");
    }
  }
  for (std::size_t i = 0; i + 1 < combo.assignments.size(); ++i) {
    for (std::size_t j = i + 1; j < combo.assignments.size(); ++j) {
      if (combo.assignments[i].cluster == combo.assignments[j].cluster) {
        throw ValidationError("combination assigns cluster " +
                              std::to_string(combo.assignments[i].cluster) + " twice");
      }
    }
  }
}

std::string canonical_encoding(const AssignmentCombination& combo,
                               const ClusterModel& model) {
  validate_combination(combo, model);
  std::vector<std::pair<std::string, int>> parts;
  parts.reserve(combo.assignments.size());
  for (const auto& a : combo.assignments) {
    parts.emplace_back(model.clusters[a.cluster].display_name, a.label);
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ';';
    out += parts[i].first;
    out += parts[i].second > 0 ? "=+1" : "=-1";
  }
  return out;
}

std::vector<std::uint8_t> template_mask(const AnnotationTable& table,
                                        const ClusterModel& model,
                                        const AssignmentCombination& combo) {
  validate_combination(combo, model);
  LabelRequirements reqs;
  for (const auto& a : combo.assignments) {
    const auto r = requirements_for(model.clusters[a.cluster], a.label);
    reqs.insert(reqs.end(), r.begin(), r.end());
  }

  std::vector<std::uint8_t> mask(table.size(), 1);
  if (reqs.empty()) return mask;

  const std::size_t k = table.attribute_count();
  for (const auto& [attr, label] : reqs) {
    if (attr >= k) throw ValidationError("requirement on unknown attribute index");
  }
  parallel_for(table.size(), 16384, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const Label* row = table.labels.data() + r * k;
      std::uint8_t ok = 1;
      for (const auto& [attr, label] : reqs) {
        if (int(row[attr]) != label) {
          ok = 0;
          break;
        }
      }
      mask[r] = ok;
    }
  });
  return mask;
}

std::vector<std::uint32_t> FilterResult::all_indices() const {
  std::vector<std::uint32_t> out;
  out.reserve(retained_genuine() + impostor[0].size() + impostor[1].size());
  for (const auto* part : {&genuine[0], &genuine[1], &impostor[0], &impostor[1]}) {
    out.insert(out.end(), part->begin(), part->end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

FilterResult filter_comparisons(const Dataset& data, const ClusterModel& model,
                                const AssignmentCombination& combo) {
  const auto mask = template_mask(*data.table, model, combo);
  const std::size_t n = data.store->size();

  // Fixed chunking; per-chunk buckets concatenated in chunk order keep the
  // output identical for any worker count.
  const std::size_t chunk = 65536;
  const std::size_t num_chunks = (n + chunk - 1) / chunk;
  struct Bucket {
    std::array<std::vector<std::uint32_t>, kGenderCount> genuine;
    std::array<std::vector<std::uint32_t>, kGenderCount> impostor;
  };
  std::vector<Bucket> buckets(num_chunks);

  const ComparisonStore& store = *data.store;
  parallel_for(n, chunk, [&](std::size_t begin, std::size_t end) {
    Bucket& b = buckets[begin / chunk];
    for (std::size_t i = begin; i < end; ++i) {
      if (!mask[data.row_a[i]] || !mask[data.row_b[i]]) continue;
      const std::size_t g = std::size_t(store.gender[i]);
      if (store.kind[i] == Kind::Genuine) {
        b.genuine[g].push_back(std::uint32_t(i));
      } else {
        b.impostor[g].push_back(std::uint32_t(i));
      }
    }
  });

  FilterResult out;
  for (std::size_t g = 0; g < kGenderCount; ++g) {
    std::size_t ng = 0, ni = 0;
    for (const auto& b : buckets) {
      ng += b.genuine[g].size();
      ni += b.impostor[g].size();
    }
    out.genuine[g].reserve(ng);
    out.impostor[g].reserve(ni);
    for (const auto& b : buckets) {
      out.genuine[g].insert(out.genuine[g].end(), b.genuine[g].begin(), b.genuine[g].end());
      out.impostor[g].insert(out.impostor[g].end(), b.impostor[g].begin(),
                             b.impostor[g].end());
    }
  }
  return out;
}

namespace {

RngStream stream_for(const SampleSeed& seed, Gender gender, Kind kind, int set_index) {
  return RngStream(SeedChain{}
                       .add(seed.master)
                       .add(seed.combo_key)
                       .add(std::uint64_t(gender))
                       .add(std::uint64_t(kind))
                       .add(std::uint64_t(set_index))
                       .digest());
}

// First `count` elements of a partial Fisher-Yates shuffle over `pool`.
std::vector<std::uint32_t> draw_without_replacement(std::vector<std::uint32_t> pool,
                                                    std::size_t count, RngStream rng) {
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

std::optional<SampleSets> sample(
    const std::array<std::vector<std::uint32_t>, kGenderCount>& genuine_pools,
    const std::array<std::vector<std::uint32_t>, kGenderCount>& impostor_pools,
    const SampleParams& params, const SampleSeed& seed) {
  if (!(params.rho_s > 0.0 && params.rho_s <= 1.0)) {
    throw ValidationError("sample: rho_s must be in (0,1]");
  }
  if (params.gamma < 1) throw ValidationError("sample: gamma must be >= 1");
  if (params.lambda_g < 1) throw ValidationError("sample: lambda_g must be >= 1");

  const std::size_t cg_plus = std::min(genuine_pools[0].size(), genuine_pools[1].size());
  const std::size_t ci_plus = std::min(impostor_pools[0].size(), impostor_pools[1].size());
  const std::size_t cg_disjoint = cg_plus / std::size_t(params.gamma);
  const std::uint64_t lambda_i =
      std::uint64_t(std::floor(double(params.lambda_g) / params.rho_s));

  if (cg_disjoint < params.lambda_g || ci_plus < lambda_i) return std::nullopt;

  // The printed guard multiplies by rho_s, but the demanded impostor count in
  // the other branch is c_g / rho_s; the division form is the one consistent
  // with that demand and with "impostors per genuine".
  std::size_t c_g = 0, c_i = 0;
  if (double(cg_disjoint) / params.rho_s > double(ci_plus)) {
    c_i = ci_plus;  // keep all impostor samples
    c_g = std::size_t(std::floor(double(ci_plus) * params.rho_s));
  } else {
    c_g = cg_disjoint;  // keep all genuine samples
    c_i = std::size_t(std::floor(double(cg_disjoint) / params.rho_s));
  }

  SampleSets sets;
  sets.c_g = c_g;
  sets.c_i = c_i;
  for (std::size_t g = 0; g < kGenderCount; ++g) {
    // gamma disjoint genuine sets: one draw of gamma*c_g distinct indices,
    // chunked.
    auto flat = draw_without_replacement(genuine_pools[g],
                                         std::size_t(params.gamma) * c_g,
                                         stream_for(seed, Gender(g), Kind::Genuine, 0));
    sets.genuine[g].resize(params.gamma);
    for (int s = 0; s < params.gamma; ++s) {
      sets.genuine[g][s].assign(flat.begin() + std::ptrdiff_t(s) * std::ptrdiff_t(c_g),
                                flat.begin() + std::ptrdiff_t(s + 1) * std::ptrdiff_t(c_g));
    }
    sets.impostor[g].resize(params.gamma);
    for (int s = 0; s < params.gamma; ++s) {
      sets.impostor[g][s] = draw_without_replacement(
          impostor_pools[g], c_i, stream_for(seed, Gender(g), Kind::Impostor, s));
    }
  }
  return sets;
}

std::optional<EvalResult> equalize(const Dataset& data, const ClusterModel& model,
                                   const AssignmentCombination& combo,
                                   const EqualizeParams& params) {
  const FilterResult filtered = filter_comparisons(data, model, combo);
  const SampleSeed seed{params.seed, canonical_encoding(combo, model)};
  const auto sets = sample(filtered.genuine, filtered.impostor, params.sampling, seed);
  if (!sets) return std::nullopt;

  const auto gather = [&](const std::vector<std::uint32_t>& idx) {
    std::vector<double> scores(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) scores[i] = data.store->score[idx[i]];
    return scores;
  };
  GenderScores male, female;
  for (int s = 0; s < params.sampling.gamma; ++s) {
    male.genuine.push_back(gather(sets->genuine[0][s]));
    male.impostor.push_back(gather(sets->impostor[0][s]));
    female.genuine.push_back(gather(sets->genuine[1][s]));
    female.impostor.push_back(gather(sets->impostor[1][s]));
  }

  EvalResult res = evaluate_groups(male, female, params.op);
  res.retained_genuine = filtered.retained_genuine();
  return res;
}

SamplingProbe make_sampling_probe(const Dataset& data, const SampleParams& params) {
  const Dataset* d = &data;
  const SampleParams p = params;
  return [d, p](const LabelRequirements& reqs) {
    const AnnotationTable& table = *d->table;
    const std::size_t k = table.attribute_count();
    std::vector<std::uint8_t> mask(table.size(), 1);
    parallel_for(table.size(), 16384, [&](std::size_t begin, std::size_t end) {
      for (std::size_t r = begin; r < end; ++r) {
        const Label* row = table.labels.data() + r * k;
        std::uint8_t ok = 1;
        for (const auto& [attr, label] : reqs) {
          if (int(row[attr]) != label) {
            ok = 0;
            break;
          }
        }
        mask[r] = ok;
      }
    });

    std::array<std::size_t, kGenderCount> genuine{}, impostor{};
    const ComparisonStore& store = *d->store;
    for (std::size_t i = 0; i < store.size(); ++i) {
      if (!mask[d->row_a[i]] || !mask[d->row_b[i]]) continue;
      if (store.kind[i] == Kind::Genuine) {
        ++genuine[std::size_t(store.gender[i])];
      } else {
        ++impostor[std::size_t(store.gender[i])];
      }
    }
    const std::size_t cg_disjoint =
        std::min(genuine[0], genuine[1]) / std::size_t(p.gamma);
    const std::uint64_t lambda_i =
        std::uint64_t(std::floor(double(p.lambda_g) / p.rho_s));
    return cg_disjoint >= p.lambda_g && std::min(impostor[0], impostor[1]) >= lambda_i;
  };
}

}  // namespace fairprobe
