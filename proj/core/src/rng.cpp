#include "wzis/rng.hpp"

#include "wzis/error.hpp"

namespace wzis {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t Rng::next_below(std::uint64_t n) {
  require(n >= 1, ErrorCode::kInternal, "next_below: n must be >= 1");
  if (n == 1) return 0;
  // Rejection sampling over the largest multiple of n below 2^64.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v;
  do {
    v = gen_();
  } while (v >= limit);
  return v % n;
}

int Rng::sample_pmf(std::span<const double> pmf) {
  require(!pmf.empty(), ErrorCode::kInternal, "sample_pmf: empty pmf");
  const double r = next_unit();
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (r < acc) return static_cast<int>(i);
  }
  return static_cast<int>(pmf.size() - 1);
}

Seed derive_seed(Seed master, std::string_view label, std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h ^= fnv1a(label);
  h = splitmix64(h);
  h ^= index;
  return splitmix64(h);
}

}  // namespace wzis
