#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace fairprobe {

// Minimal streaming SHA-256 (FIPS 180-4), used for dataset fingerprints and
// the comparison-file trailer.
class Sha256 {
 public:
  Sha256() { reset(); }

  void reset();
  void update(const void* data, std::size_t len);
  std::array<std::uint8_t, 32> finish();

  static std::array<std::uint8_t, 32> digest(const void* data, std::size_t len);
  static std::string hex(const std::array<std::uint8_t, 32>& d);

 private:
  void process_block(const std::uint8_t* block);

  std::uint32_t state_[8];
  std::uint64_t bit_count_ = 0;
  std::uint8_t buffer_[64];
  std::size_t buffer_len_ = 0;
};

}  // namespace fairprobe
