#include "fairprobe/types.hpp"

#include "fairprobe/sha256.hpp"
#include "fairprobe/wire.hpp"

namespace fairprobe {

void AnnotationTable::finalize() {
  const std::size_t n = template_ids.size();
  const std::size_t k = attribute_names.size();
  if (identity.size() != n || gender.size() != n || labels.size() != n * k) {
    throw ValidationError("annotation table: column sizes are inconsistent");
  }
  if (embedding_dim > 0 && embeddings.size() != n * embedding_dim) {
    throw ValidationError("annotation table: embedding block size mismatch");
  }
  for (std::size_t i = 0; i + 1 < attribute_names.size(); ++i) {
    for (std::size_t j = i + 1; j < attribute_names.size(); ++j) {
      if (attribute_names[i] == attribute_names[j]) {
        throw ValidationError("annotation table: duplicate attribute name '" +
                              attribute_names[i] + "'");
      }
    }
  }
  id_to_row_.clear();
  id_to_row_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!id_to_row_.emplace(template_ids[i], std::uint32_t(i)).second) {
      throw ValidationError("annotation table: duplicate template_id " +
                            std::to_string(template_ids[i]));
    }
  }
}

std::uint32_t AnnotationTable::row_of(std::uint64_t template_id) const {
  const auto it = id_to_row_.find(template_id);
  if (it == id_to_row_.end()) {
    throw ValidationError("unknown template_id " + std::to_string(template_id));
  }
  return it->second;
}

void ComparisonStore::compute_fingerprint() {
  Sha256 h;
  std::uint8_t rec[wire::kComparisonRecordSize];
  for (std::size_t i = 0; i < size(); ++i) {
    wire::encode_comparison(*this, i, rec);
    h.update(rec, sizeof rec);
  }
  dataset_fingerprint = Sha256::hex(h.finish());
}

Dataset Dataset::link(const AnnotationTable& table, const ComparisonStore& store) {
  Dataset d;
  d.table = &table;
  d.store = &store;
  d.row_a.resize(store.size());
  d.row_b.resize(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const std::uint32_t ra = table.row_of(store.idx_a[i]);
    const std::uint32_t rb = table.row_of(store.idx_b[i]);
    if (store.idx_a[i] == store.idx_b[i]) {
      throw ValidationError("comparison " + std::to_string(i) +
                            ": pairs a template with itself");
    }
    if (table.gender[ra] != table.gender[rb] || table.gender[ra] != store.gender[i]) {
      throw ValidationError("comparison " + std::to_string(i) +
                            ": gender columns disagree (same-gender pairs only)");
    }
    const bool same_identity = table.identity[ra] == table.identity[rb];
    if (same_identity != (store.kind[i] == Kind::Genuine)) {
      throw ValidationError("comparison " + std::to_string(i) +
                            ": kind does not match identity equality");
    }
    d.row_a[i] = ra;
    d.row_b[i] = rb;
  }
  return d;
}

}  // namespace fairprobe
