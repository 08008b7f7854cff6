#pragma once

#include <cstdint>

#include "fairprobe/types.hpp"

namespace fairprobe {

struct ComparisonPolicy {
  // 0 keeps every within-identity pair; otherwise a uniform sample per identity.
  std::size_t max_genuine_per_identity = 0;
  // Impostor pairs drawn per gender, impostor_per_genuine x that gender's
  // genuine count.
  double impostor_per_genuine = 20.0;
  std::uint64_t seed = 0;
};

// Builds the same-gender comparison store from embeddings: all (or capped)
// genuine pairs per identity plus uniformly drawn within-gender impostor
// pairs, scored by cosine similarity. Deterministic for a fixed seed,
// independent of the worker count.
ComparisonStore generate_comparisons(const AnnotationTable& table,
                                     const ComparisonPolicy& policy);

double cosine_similarity(std::span<const float> a, std::span<const float> b);

}  // namespace fairprobe
