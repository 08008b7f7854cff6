#pragma once

#include <bit>
#include <cstdint>
#include <cstring>

#include "fairprobe/types.hpp"

namespace fairprobe::wire {

inline void put_u32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = std::uint8_t(v >> (8 * i));
}
inline void put_u64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = std::uint8_t(v >> (8 * i));
}
inline void put_f64(std::uint8_t* p, double v) {
  put_u64(p, std::bit_cast<std::uint64_t>(v));
}
inline void put_f32(std::uint8_t* p, float v) {
  put_u32(p, std::bit_cast<std::uint32_t>(v));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}
inline std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}
inline double get_f64(const std::uint8_t* p) {
  return std::bit_cast<double>(get_u64(p));
}
inline float get_f32(const std::uint8_t* p) {
  return std::bit_cast<float>(get_u32(p));
}

inline constexpr std::size_t kComparisonRecordSize = 8 + 8 + 8 + 1 + 1;

inline void encode_comparison(const ComparisonStore& s, std::size_t i,
                              std::uint8_t out[kComparisonRecordSize]) {
  put_u64(out, s.idx_a[i]);
  put_u64(out + 8, s.idx_b[i]);
  put_f64(out + 16, s.score[i]);
  out[24] = std::uint8_t(s.kind[i]);
  out[25] = std::uint8_t(s.gender[i]);
}

}  // namespace fairprobe::wire
