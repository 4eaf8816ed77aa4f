#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wzis/fsm.hpp"
#include "wzis/model.hpp"

namespace wzis {

// Enumeration domain for the operational optimum. Pairs are built around a
// shared parse machine (per-parse-state prefix codes plus codeword-driven
// transitions); encoder states and decoder states both carry parse labels,
// which keeps every emitted pair parseable by construction.
struct SearchGrid {
  int max_states = 2;   // M
  int max_delay = 1;    // d
  int max_len = 2;      // L_max
  int alpha = 2;
  int beta = 2;
  int gamma = 2;
  std::uint64_t budget = 100'000'000;
  // Restrict per-state codes to complete code trees with <= alpha leaves
  // (used by the enumerate-and-describe wrapper, whose header indexes trees).
  bool complete_codes_only = false;
  // Restrict decoder transitions to ignore the side letter (wrapper family).
  bool y_invariant_next = false;
};

// Closed-form enumeration size. Exact for max_states <= 2; for larger state
// counts the canonical filter only removes relabel-duplicates, so the value
// is an upper bound (and stays the budget gate either way).
std::uint64_t pair_count(const SearchGrid& grid);

using PairVisitor = std::function<void(const FsmEncoder&, const FsmDecoder&)>;

// Streams every encoder/decoder pair of the grid exactly once up to
// state-relabeling equivalence. Errors: BudgetExceeded.
std::uint64_t enumerate_pairs(const SearchGrid& grid, const PairVisitor& visit);

struct OperationalResult {
  bool feasible = false;
  double distortion = 0.0;
  std::int64_t bits = 0;
  double rate_used = 0.0;  // bits / n
  FsmEncoder encoder;
  FsmDecoder decoder;
};

// One (rate, states, delay) constraint evaluated by the sweep.
struct BucketSpec {
  double rate = 0.0;
  int max_states = 1;
  int max_delay = 0;
};

// Minimum exact expected distortion over all pairs meeting the constraints,
// every bucket served by one enumeration sweep. Ties in distortion break by
// fewer total bits, then by canonical machine order. Errors: BudgetExceeded.
std::vector<OperationalResult> operational_optimum_batch(const Sequence& x,
                                                         std::span<const BucketSpec> buckets,
                                                         const SearchGrid& grid,
                                                         const Channel& ch,
                                                         const DistortionMatrix& rho);

OperationalResult operational_optimum(const Sequence& x, double rate, const SearchGrid& grid,
                                      const Channel& ch, const DistortionMatrix& rho);

}  // namespace wzis
