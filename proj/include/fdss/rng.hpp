// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Keyed random streams. A stream is a pure function of (seed, purpose,
// index...) so any replicate, path or draw can be regenerated in isolation
// and results never depend on how work is scheduled across threads.
#pragma once

#include <cstdint>
#include <initializer_list>

namespace fdss::rng {

// Stream purposes. Distinct purposes never alias even for equal indices.
enum class Purpose : std::uint64_t {
  path_gaussian = 1,
  path_chi_square = 2,
  path_contamination = 3,
  replication = 4,
  test_calibration = 5,
  null_draw = 6,
  resample = 7,
  subsample = 8,
  power_mc = 9,
  user = 10,
};

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Folds a sequence of words into one 64-bit key.
constexpr std::uint64_t mix_key(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  for (std::uint64_t w : words) {
    state = key ^ (w + 0x632BE59BD9B4E019ULL);
    key = splitmix64(state);
  }
  return key;
}

// Derives a child seed, e.g. the seed of replication r from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, Purpose purpose,
                                    std::uint64_t index,
                                    std::uint64_t sub = 0) noexcept {
  return mix_key(seed, {static_cast<std::uint64_t>(purpose), index, sub});
}

// xoshiro256** seeded from a derived key.
class Stream {
 public:
  Stream(std::uint64_t seed, Purpose purpose, std::uint64_t index = 0,
         std::uint64_t sub = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on the open interval (0, 1).
  double uniform() noexcept;
  // Uniform integer in [0, bound), bound > 0, unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  // Gamma(shape, 1), shape > 0.
  double gamma(double shape) noexcept;
  double chi_square(double df) noexcept { return 2.0 * gamma(0.5 * df); }

 private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fdss::rng
