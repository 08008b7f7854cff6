#include "fairprobe/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <vector>

#include "fairprobe/sha256.hpp"
#include "fairprobe/wire.hpp"

namespace fairprobe {
namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw ValidationError(path + ":" + std::to_string(line) + ": " + what);
}

void split_csv_line(const std::string& line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.emplace_back(line.data() + start, i - start);
      start = i + 1;
    }
  }
}

std::ifstream open_input(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

AnnotationTable load_annotations(const std::string& path) {
  std::ifstream in = open_input(path, std::ios::in);
  AnnotationTable table;

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;

  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  split_csv_line(line, fields);
  if (fields.size() < 3 || fields[0] != "template_id" || fields[1] != "identity_id" ||
      fields[2] != "gender") {
    fail(path, line_no, "header must start with template_id,identity_id,gender");
  }
  for (std::size_t i = 3; i < fields.size(); ++i) {
    if (fields[i].empty()) fail(path, line_no, "empty attribute name in header");
    table.attribute_names.emplace_back(fields[i]);
  }
  const std::size_t k = table.attribute_names.size();

  std::unordered_map<std::string, std::uint32_t> identity_index;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    split_csv_line(line, fields);
    if (fields.size() != 3 + k) {
      fail(path, line_no, "expected " + std::to_string(3 + k) + " fields, got " +
                              std::to_string(fields.size()));
    }

    std::uint64_t id = 0;
    auto [p, ec] = std::from_chars(fields[0].begin(), fields[0].end(), id);
    if (ec != std::errc{} || p != fields[0].end()) {
      fail(path, line_no, "malformed template_id '" + std::string(fields[0]) + "'");
    }

    if (fields[1].empty()) fail(path, line_no, "empty identity_id");
    auto [it, inserted] = identity_index.emplace(std::string(fields[1]),
                                                 std::uint32_t(table.identity_names.size()));
    if (inserted) table.identity_names.emplace_back(fields[1]);

    Gender g;
    if (fields[2] == "M") {
      g = Gender::Male;
    } else if (fields[2] == "F") {
      g = Gender::Female;
    } else {
      fail(path, line_no, "gender must be M or F, got '" + std::string(fields[2]) + "'");
    }

    table.template_ids.push_back(id);
    table.identity.push_back(it->second);
    table.gender.push_back(g);
    for (std::size_t i = 0; i < k; ++i) {
      const std::string_view f = fields[3 + i];
      long v = 0;
      auto [pp, lec] = std::from_chars(f.begin(), f.end(), v);
      if (lec != std::errc{} || pp != f.end() || !is_valid_label(v)) {
        fail(path, line_no, "label for '" + table.attribute_names[i] +
                                "' must be -1, 0 or 1, got '" + std::string(f) + "'");
      }
      table.labels.push_back(Label(v));
    }
  }

  try {
    table.finalize();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return table;
}

void save_annotations(const AnnotationTable& table, const std::string& path) {
  std::ofstream out = open_output(path, std::ios::out | std::ios::binary);
  out << "template_id,identity_id,gender";
  for (const auto& name : table.attribute_names) out << ',' << name;
  out << '\n';
  const std::size_t k = table.attribute_count();
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << table.template_ids[r] << ',' << table.identity_names[table.identity[r]]
        << ',' << gender_code(table.gender[r]);
    for (std::size_t a = 0; a < k; ++a) out << ',' << int(table.label(r, a));
    out << '\n';
  }
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

namespace {
constexpr char kEmbeddingMagic[4] = {'F', 'P', 'E', 'M'};
constexpr char kComparisonMagic[4] = {'F', 'P', 'C', 'M'};
}  // namespace

void save_embeddings(const AnnotationTable& table, const std::string& path) {
  if (!table.has_embeddings()) {
    throw ValidationError("annotation table carries no embeddings");
  }
  std::ofstream out = open_output(path, std::ios::out | std::ios::binary);
  std::uint8_t header[16];
  std::memcpy(header, kEmbeddingMagic, 4);
  wire::put_u32(header + 4, 1);
  wire::put_u32(header + 8, std::uint32_t(table.size()));
  wire::put_u32(header + 12, table.embedding_dim);
  out.write(reinterpret_cast<const char*>(header), sizeof header);

  std::vector<std::uint8_t> rec(8 + std::size_t(table.embedding_dim) * 4);
  for (std::size_t r = 0; r < table.size(); ++r) {
    wire::put_u64(rec.data(), table.template_ids[r]);
    const auto emb = table.embedding(r);
    for (std::uint32_t i = 0; i < table.embedding_dim; ++i) {
      wire::put_f32(rec.data() + 8 + 4 * i, emb[i]);
    }
    out.write(reinterpret_cast<const char*>(rec.data()), std::streamsize(rec.size()));
  }
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

void load_embeddings(AnnotationTable& table, const std::string& path) {
  std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
  std::uint8_t header[16];
  if (!in.read(reinterpret_cast<char*>(header), sizeof header) ||
      std::memcmp(header, kEmbeddingMagic, 4) != 0) {
    throw ValidationError(path + ": not an FPEM embedding file");
  }
  if (wire::get_u32(header + 4) != 1) {
    throw ValidationError(path + ": unsupported FPEM version");
  }
  const std::uint32_t count = wire::get_u32(header + 8);
  const std::uint32_t dim = wire::get_u32(header + 12);
  if (dim == 0) throw ValidationError(path + ": embedding dimension is zero");

  table.embedding_dim = dim;
  table.embeddings.assign(table.size() * std::size_t(dim), 0.0f);
  std::vector<bool> seen(table.size(), false);

  std::vector<std::uint8_t> rec(8 + std::size_t(dim) * 4);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!in.read(reinterpret_cast<char*>(rec.data()), std::streamsize(rec.size()))) {
      throw ValidationError(path + ": truncated embedding record " + std::to_string(i));
    }
    const std::uint64_t id = wire::get_u64(rec.data());
    std::uint32_t row;
    try {
      row = table.row_of(id);
    } catch (const ValidationError&) {
      throw ValidationError(path + ": embedding references unknown template_id " +
                            std::to_string(id));
    }
    seen[row] = true;
    float* dst = table.embeddings.data() + std::size_t(row) * dim;
    for (std::uint32_t d = 0; d < dim; ++d) dst[d] = wire::get_f32(rec.data() + 8 + 4 * d);
  }
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (!seen[r]) {
      throw ValidationError(path + ": no embedding for template_id " +
                            std::to_string(table.template_ids[r]));
    }
  }
}

void save_comparisons(const ComparisonStore& store, const std::string& path) {
  std::ofstream out = open_output(path, std::ios::out | std::ios::binary);
  Sha256 hash;

  std::uint8_t header[16];
  std::memcpy(header, kComparisonMagic, 4);
  wire::put_u32(header + 4, 1);
  wire::put_u64(header + 8, store.size());
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  hash.update(header, sizeof header);

  std::uint8_t rec[wire::kComparisonRecordSize];
  for (std::size_t i = 0; i < store.size(); ++i) {
    wire::encode_comparison(store, i, rec);
    out.write(reinterpret_cast<const char*>(rec), sizeof rec);
    hash.update(rec, sizeof rec);
  }
  const auto digest = hash.finish();
  out.write(reinterpret_cast<const char*>(digest.data()), std::streamsize(digest.size()));
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

ComparisonStore load_comparisons(const std::string& path) {
  std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
  std::uint8_t header[16];
  if (!in.read(reinterpret_cast<char*>(header), sizeof header) ||
      std::memcmp(header, kComparisonMagic, 4) != 0) {
    throw ValidationError(path + ": not an FPCM comparison file");
  }
  if (wire::get_u32(header + 4) != 1) {
    throw ValidationError(path + ": unsupported FPCM version");
  }
  const std::uint64_t count = wire::get_u64(header + 8);

  Sha256 hash;
  hash.update(header, sizeof header);

  ComparisonStore store;
  store.idx_a.reserve(count);
  store.idx_b.reserve(count);
  store.score.reserve(count);
  store.kind.reserve(count);
  store.gender.reserve(count);

  Sha256 record_hash;  // fingerprint covers records only, not the header
  std::uint8_t rec[wire::kComparisonRecordSize];
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!in.read(reinterpret_cast<char*>(rec), sizeof rec)) {
      throw ValidationError(path + ": truncated at record " + std::to_string(i));
    }
    hash.update(rec, sizeof rec);
    record_hash.update(rec, sizeof rec);
    if (rec[24] > 1) {
      throw ValidationError(path + ": record " + std::to_string(i) + ": bad kind byte");
    }
    if (rec[25] > 1) {
      throw ValidationError(path + ": record " + std::to_string(i) + ": bad gender byte");
    }
    store.push_back(wire::get_u64(rec), wire::get_u64(rec + 8), wire::get_f64(rec + 16),
                    Kind(rec[24]), Gender(rec[25]));
  }

  std::array<std::uint8_t, 32> stored{};
  if (!in.read(reinterpret_cast<char*>(stored.data()), std::streamsize(stored.size()))) {
    throw ValidationError(path + ": missing content hash trailer");
  }
  if (stored != hash.finish()) {
    throw ValidationError(path + ": content hash mismatch (file corrupted or edited)");
  }
  store.dataset_fingerprint = Sha256::hex(record_hash.finish());
  return store;
}

}  // namespace fairprobe
