#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace wzis {

// Project-wide PRNG: std::mt19937_64. The raw generator word sequence is
// fixed by the C++ standard, and every sampling helper below is written in
// terms of raw words only, so identical seeds give bit-identical results on
// any platform. std:: distributions are never used (their output is
// implementation-defined).
using Seed = std::uint64_t;

class Rng {
 public:
  explicit Rng(Seed seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0,1), 53 random bits.
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), rejection sampled. n >= 1.
  std::uint64_t next_below(std::uint64_t n);

  // Index sampled from an (unnormalized is NOT allowed) pmf by CDF inversion.
  // Falls back to the last index on accumulated rounding.
  int sample_pmf(std::span<const double> pmf);

  bool bernoulli(double p) { return next_unit() < p; }

 private:
  std::mt19937_64 gen_;
};

// Seed for a named sub-operation. Streams derived with distinct labels or
// indices are independent for all practical purposes. Labels used by the
// toolkit are short constants, e.g. "side_info", "wz_restart", "codec_mix",
// "typicality", "converse", "dms".
Seed derive_seed(Seed master, std::string_view label, std::uint64_t index = 0);

}  // namespace wzis
