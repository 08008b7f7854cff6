#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace fairprobe {

// Invalid file contents, invalid configuration, contract violations by inputs.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when even the unfiltered dataset cannot satisfy the sampling guards.
class InsufficientSamplesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Gender : std::uint8_t { Male = 0, Female = 1 };
enum class Kind : std::uint8_t { Impostor = 0, Genuine = 1 };

inline constexpr std::size_t kGenderCount = 2;

inline const char* gender_name(Gender g) {
  return g == Gender::Male ? "male" : "female";
}
inline char gender_code(Gender g) { return g == Gender::Male ? 'M' : 'F'; }

// Ternary annotation label: -1 absent, 0 unclear, +1 present.
using Label = std::int8_t;

inline bool is_valid_label(long v) { return v == -1 || v == 0 || v == 1; }

// Columnar table of annotated templates. Immutable once finalized; shared
// freely across threads.
struct AnnotationTable {
  std::vector<std::string> attribute_names;
  std::vector<std::uint64_t> template_ids;
  std::vector<std::uint32_t> identity;  // index into identity_names
  std::vector<std::string> identity_names;
  std::vector<Gender> gender;
  std::vector<Label> labels;  // row-major, size = rows * attribute_count
  std::vector<float> embeddings;  // optional, rows * embedding_dim
  std::uint32_t embedding_dim = 0;

  std::size_t size() const { return template_ids.size(); }
  std::size_t attribute_count() const { return attribute_names.size(); }

  Label label(std::size_t row, std::size_t attr) const {
    return labels[row * attribute_names.size() + attr];
  }
  Label& label(std::size_t row, std::size_t attr) {
    return labels[row * attribute_names.size() + attr];
  }

  bool has_embeddings() const { return embedding_dim > 0; }
  std::span<const float> embedding(std::size_t row) const {
    return {embeddings.data() + row * embedding_dim, embedding_dim};
  }

  // Builds the id lookup and checks structural invariants (unique ids,
  // annotation row width). Call after filling the columns.
  void finalize();

  std::uint32_t row_of(std::uint64_t template_id) const;
  bool has_template(std::uint64_t template_id) const {
    return id_to_row_.count(template_id) != 0;
  }

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> id_to_row_;
};

// Columnar store of same-gender comparisons.
struct ComparisonStore {
  std::vector<std::uint64_t> idx_a;
  std::vector<std::uint64_t> idx_b;
  std::vector<double> score;
  std::vector<Kind> kind;
  std::vector<Gender> gender;
  std::string dataset_fingerprint;  // hex SHA-256 of the record bytes

  std::size_t size() const { return score.size(); }

  void push_back(std::uint64_t a, std::uint64_t b, double s, Kind k, Gender g) {
    idx_a.push_back(a);
    idx_b.push_back(b);
    score.push_back(s);
    kind.push_back(k);
    gender.push_back(g);
  }

  // Fingerprint over the exact record bytes the file format serializes, so a
  // generated store and its saved/reloaded copy agree.
  void compute_fingerprint();
};

// A comparison store linked against its annotation table: template ids are
// resolved to table rows and the cross-referencing invariants are checked.
struct Dataset {
  const AnnotationTable* table = nullptr;
  const ComparisonStore* store = nullptr;
  std::vector<std::uint32_t> row_a;
  std::vector<std::uint32_t> row_b;

  static Dataset link(const AnnotationTable& table, const ComparisonStore& store);
};

}  // namespace fairprobe
