#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wzis/bitstream.hpp"
#include "wzis/model.hpp"

namespace wzis {

// Block ids are big-endian base-alpha digit strings: the first letter of a
// block is the most significant digit. All dense tables over blocks in the
// toolkit use this indexing.
std::int64_t block_id(std::span<const int> symbols, int alphabet);
void block_symbols(std::int64_t id, int alphabet, int block_len, std::span<int> out);
std::int64_t pow_int(std::int64_t base, int exp);

// Empirical distribution of the non-overlapping length-ell blocks of a
// sequence. For distributions built from data, counts are integers summing
// to n/ell and probs = counts*ell/n; distributions built from a source model
// carry probabilities only.
struct BlockDistribution {
  int block_len = 1;   // ell
  int alphabet = 1;    // alpha
  std::int64_t n = 0;  // source length in letters; 0 for model-built
  std::optional<std::vector<std::int64_t>> counts;
  std::vector<double> probs;  // size alpha^ell

  std::int64_t num_blocks() const { return block_len == 0 ? 0 : n / block_len; }
  std::int64_t table_size() const { return static_cast<std::int64_t>(probs.size()); }
};

// Counts non-overlapping ell-blocks. Errors: LengthNotDivisible.
BlockDistribution block_empirical(const Sequence& x, int block_len);

// Exact ell-fold product of a single-letter pmf (DMS source model).
BlockDistribution product_block_distribution(std::span<const double> pmf, int block_len);

// P(a^ell, b^ell) = P(a^ell) * prod_i P(b_i|a_i), stored densely.
struct JointBlockDistribution {
  BlockDistribution source;
  Channel letter_channel;
  int block_len = 1;
  std::int64_t na = 1;        // alpha^ell
  std::int64_t nb = 1;        // beta^ell
  std::vector<double> cond;   // P(b|a), row-major na x nb
  std::vector<double> joint;  // P(a,b) = P(a) * cond

  double source_prob(std::int64_t a) const { return source.probs[static_cast<std::size_t>(a)]; }
  std::span<const double> cond_row(std::int64_t a) const {
    return {cond.data() + a * nb, static_cast<std::size_t>(nb)};
  }
};

// Errors: TableTooLarge if alpha^ell * beta^ell exceeds cap.
JointBlockDistribution join_with_channel(const BlockDistribution& p, const Channel& ch,
                                         std::int64_t cap = std::int64_t{1} << 24);

// ---- Type header ----------------------------------------------------------
//
// The header is one format-flag bit followed by either
//   flag 0: the combinatorial rank of the count vector among all weak
//           compositions of n/ell into alpha^ell parts (lexicographic order
//           of count vectors), in exactly ceil(log2 #compositions) bits;
//   flag 1: alpha^ell fixed fields of ceil(log2(n/ell+1)) bits each
//           (fallback when the rank does not fit in 63 bits).
// All fields MSB-first. This layout is normative for the universal codec.

struct TypeHeaderInfo {
  bool rank_format = true;
  std::int64_t payload_bits = 0;
  std::int64_t total_bits = 0;  // payload + flag bit
};

TypeHeaderInfo type_header_info(std::int64_t n, int block_len, int alphabet);

Bitstream encode_type(const BlockDistribution& p, std::int64_t n);
BlockDistribution decode_type(BitReader& reader, std::int64_t n, int block_len, int alphabet);
BlockDistribution decode_type(const Bitstream& bits, std::int64_t n, int block_len, int alphabet);

// Composition ranking (exposed for tests). Both fail with RankOverflow when
// the rank space exceeds 63 bits.
std::uint64_t composition_count(std::int64_t total, std::int64_t parts);  // C(total+parts-1, parts-1)
std::uint64_t composition_rank(std::span<const std::int64_t> counts);
std::vector<std::int64_t> composition_unrank(std::uint64_t rank, std::int64_t total,
                                             std::int64_t parts);

}  // namespace wzis
