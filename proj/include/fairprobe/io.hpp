#pragma once

#include <string>

#include "fairprobe/types.hpp"

namespace fairprobe {

// Annotation CSV: header `template_id,identity_id,gender,<attr_1>,...`;
// gender in {M,F}; labels in {-1,0,1}. UTF-8, LF line endings.
AnnotationTable load_annotations(const std::string& path);
void save_annotations(const AnnotationTable& table, const std::string& path);

// Embedding file (FPEM v1): magic, u32 version, u32 count, u32 dim, then
// count x (u64 template_id + dim x f32). Attaches vectors to table rows.
void load_embeddings(AnnotationTable& table, const std::string& path);
void save_embeddings(const AnnotationTable& table, const std::string& path);

// Comparison file (FPCM v1): magic, u32 version, u64 count, records, then a
// 32-byte SHA-256 of everything before it. Load verifies the hash; the hex
// form becomes the store's dataset_fingerprint.
ComparisonStore load_comparisons(const std::string& path);
void save_comparisons(const ComparisonStore& store, const std::string& path);

}  // namespace fairprobe
