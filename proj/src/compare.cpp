#include "fairprobe/compare.hpp"

#include <algorithm>
#include <cmath>

#include "fairprobe/parallel.hpp"
#include "fairprobe/rng.hpp"

namespace fairprobe {

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double(a[i]) * double(b[i]);
    na += double(a[i]) * double(a[i]);
    nb += double(b[i]) * double(b[i]);
  }
  const double denom = std::sqrt(na) * std::sqrt(nb);
  if (denom == 0.0) throw ValidationError("cosine similarity of a zero vector");
  return dot / denom;
}

ComparisonStore generate_comparisons(const AnnotationTable& table,
                                     const ComparisonPolicy& policy) {
  if (!table.has_embeddings()) {
    throw ValidationError("generate_comparisons: table has no embeddings");
  }

  // Group rows per identity, split by gender.
  std::vector<std::vector<std::uint32_t>> ident_rows(table.identity_names.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    ident_rows[table.identity[r]].push_back(std::uint32_t(r));
  }
  std::array<std::vector<std::uint32_t>, kGenderCount> identities_by_gender;
  std::array<std::vector<std::uint32_t>, kGenderCount> rows_by_gender;
  for (std::uint32_t id = 0; id < ident_rows.size(); ++id) {
    if (ident_rows[id].empty()) continue;
    const Gender g = table.gender[ident_rows[id].front()];
    for (std::uint32_t r : ident_rows[id]) {
      if (table.gender[r] != g) {
        throw ValidationError("identity '" + table.identity_names[id] +
                              "' spans both genders");
      }
    }
    identities_by_gender[std::size_t(g)].push_back(id);
    for (std::uint32_t r : ident_rows[id]) rows_by_gender[std::size_t(g)].push_back(r);
  }
  for (std::size_t g = 0; g < kGenderCount; ++g) {
    if (identities_by_gender[g].size() < 2) {
      throw ValidationError(std::string("fewer than 2 identities for gender ") +
                            gender_name(Gender(g)));
    }
  }

  ComparisonStore store;
  std::array<std::uint64_t, kGenderCount> genuine_count{};

  // Genuine pairs, identity order then lexicographic pair order.
  for (std::size_t g = 0; g < kGenderCount; ++g) {
    for (const std::uint32_t id : identities_by_gender[g]) {
      const auto& rows = ident_rows[id];
      std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
      for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
          pairs.emplace_back(rows[i], rows[j]);
        }
      }
      if (policy.max_genuine_per_identity > 0 &&
          pairs.size() > policy.max_genuine_per_identity) {
        RngStream rng(SeedChain{}.add(policy.seed).add("genuine").add(id).digest());
        // partial Fisher-Yates, then restore order for a canonical layout
        for (std::size_t i = 0; i < policy.max_genuine_per_identity; ++i) {
          std::swap(pairs[i], pairs[i + rng.below(pairs.size() - i)]);
        }
        pairs.resize(policy.max_genuine_per_identity);
        std::sort(pairs.begin(), pairs.end());
      }
      for (const auto& [ra, rb] : pairs) {
        store.push_back(table.template_ids[ra], table.template_ids[rb], 0.0,
                        Kind::Genuine, Gender(g));
        ++genuine_count[g];
      }
    }
  }

  // Impostor pairs, uniform within gender. Duplicate pairs are tolerated;
  // they carry the same score either way.
  for (std::size_t g = 0; g < kGenderCount; ++g) {
    const auto& rows = rows_by_gender[g];
    const std::uint64_t target =
        std::uint64_t(std::llround(policy.impostor_per_genuine * double(genuine_count[g])));
    RngStream rng(SeedChain{}.add(policy.seed).add("impostor").add(std::uint64_t(g)).digest());
    std::uint64_t made = 0;
    while (made < target) {
      const std::uint32_t ra = rows[rng.below(rows.size())];
      const std::uint32_t rb = rows[rng.below(rows.size())];
      if (table.identity[ra] == table.identity[rb]) continue;
      store.push_back(table.template_ids[std::min(ra, rb)],
                      table.template_ids[std::max(ra, rb)], 0.0, Kind::Impostor,
                      Gender(g));
      ++made;
    }
  }

  // Score everything in parallel; output slots are fixed, so scheduling
  // cannot reorder anything.
  const AnnotationTable* t = &table;
  ComparisonStore* s = &store;
  parallel_for(store.size(), 8192, [t, s](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto ea = t->embedding(t->row_of(s->idx_a[i]));
      const auto eb = t->embedding(t->row_of(s->idx_b[i]));
      s->score[i] = cosine_similarity(ea, eb);
    }
  });

  store.compute_fingerprint();
  return store;
}

}  // namespace fairprobe
