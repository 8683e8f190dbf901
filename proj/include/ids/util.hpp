// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ids {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Strips leading/trailing punctuation (quotes, brackets, sentence marks,
// currency signs). Interior characters are untouched.
std::string strip_surrounding_punct(std::string_view s);

// Hex-encoded SHA-256 of the exact input bytes.
std::string sha256_hex(std::string_view data);

uint64_t fnv1a64(std::string_view data);

// Deterministic counter-free PRNG (splitmix64). Used everywhere seeded
// behaviour must be reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  uint64_t next_u64();
  // Unbiased integer in [0, n). n must be > 0.
  size_t below(size_t n);
  double unit();  // [0, 1)

 private:
  uint64_t state_;
};

// Mixes a base seed with stream identifiers so per-query / per-iteration
// streams are independent of worker scheduling.
uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0);

std::vector<std::string> read_lines(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace ids
