#include "wzis/empirical.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "wzis/error.hpp"

namespace wzis {

std::int64_t block_id(std::span<const int> symbols, int alphabet) {
  std::int64_t id = 0;
  for (int s : symbols) id = id * alphabet + s;
  return id;
}

void block_symbols(std::int64_t id, int alphabet, int block_len, std::span<int> out) {
  for (int i = block_len - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(id % alphabet);
    id /= alphabet;
  }
}

std::int64_t pow_int(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    require(r <= (std::int64_t{1} << 62) / base, ErrorCode::kTableTooLarge,
            "power overflows 63 bits");
    r *= base;
  }
  return r;
}

BlockDistribution block_empirical(const Sequence& x, int block_len) {
  require(block_len >= 1, ErrorCode::kConfigError, "block length must be >= 1");
  require(x.size() % block_len == 0, ErrorCode::kLengthNotDivisible,
          "block length " + std::to_string(block_len) + " does not divide n=" +
              std::to_string(x.size()));
  BlockDistribution d;
  d.block_len = block_len;
  d.alphabet = x.alphabet();
  d.n = x.size();
  const std::int64_t table = pow_int(x.alphabet(), block_len);
  d.counts.emplace(static_cast<std::size_t>(table), 0);
  std::vector<int> buf(static_cast<std::size_t>(block_len));
  for (std::int64_t b = 0; b < d.num_blocks(); ++b) {
    for (int i = 0; i < block_len; ++i) buf[static_cast<std::size_t>(i)] = x[b * block_len + i];
    ++(*d.counts)[static_cast<std::size_t>(block_id(buf, x.alphabet()))];
  }
  d.probs.resize(static_cast<std::size_t>(table));
  const double scale = static_cast<double>(block_len) / static_cast<double>(d.n);
  for (std::int64_t a = 0; a < table; ++a)
    d.probs[static_cast<std::size_t>(a)] =
        static_cast<double>((*d.counts)[static_cast<std::size_t>(a)]) * scale;
  return d;
}

BlockDistribution product_block_distribution(std::span<const double> pmf, int block_len) {
  require(block_len >= 1, ErrorCode::kConfigError, "block length must be >= 1");
  double sum = 0.0;
  for (double p : pmf) {
    require(p >= 0.0, ErrorCode::kNegativeEntry, "pmf entries must be nonnegative");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= kStochasticTol, ErrorCode::kNonStochasticRow,
          "pmf must sum to 1");
  const int alpha = static_cast<int>(pmf.size());
  BlockDistribution d;
  d.block_len = block_len;
  d.alphabet = alpha;
  d.n = 0;
  const std::int64_t table = pow_int(alpha, block_len);
  d.probs.assign(static_cast<std::size_t>(table), 1.0);
  std::vector<int> buf(static_cast<std::size_t>(block_len));
  for (std::int64_t a = 0; a < table; ++a) {
    block_symbols(a, alpha, block_len, buf);
    double p = 1.0;
    for (int i = 0; i < block_len; ++i) p *= pmf[static_cast<std::size_t>(buf[static_cast<std::size_t>(i)])];
    d.probs[static_cast<std::size_t>(a)] = p;
  }
  return d;
}

JointBlockDistribution join_with_channel(const BlockDistribution& p, const Channel& ch,
                                         std::int64_t cap) {
  require(p.alphabet == ch.input_size(), ErrorCode::kConfigError,
          "block distribution alphabet does not match channel input");
  JointBlockDistribution j;
  j.source = p;
  j.letter_channel = ch;
  j.block_len = p.block_len;
  j.na = p.table_size();
  j.nb = pow_int(ch.output_size(), p.block_len);
  require(j.na <= cap / j.nb, ErrorCode::kTableTooLarge,
          "joint block table exceeds cap of " + std::to_string(cap) + " entries");
  j.cond.resize(static_cast<std::size_t>(j.na * j.nb));
  j.joint.resize(static_cast<std::size_t>(j.na * j.nb));
  std::vector<int> abuf(static_cast<std::size_t>(p.block_len));
  std::vector<int> bbuf(static_cast<std::size_t>(p.block_len));
  for (std::int64_t a = 0; a < j.na; ++a) {
    block_symbols(a, p.alphabet, p.block_len, abuf);
    for (std::int64_t b = 0; b < j.nb; ++b) {
      block_symbols(b, ch.output_size(), p.block_len, bbuf);
      double c = 1.0;
      for (int i = 0; i < p.block_len; ++i)
        c *= ch.prob(abuf[static_cast<std::size_t>(i)], bbuf[static_cast<std::size_t>(i)]);
      j.cond[static_cast<std::size_t>(a * j.nb + b)] = c;
      j.joint[static_cast<std::size_t>(a * j.nb + b)] = c * p.probs[static_cast<std::size_t>(a)];
    }
  }
  return j;
}

// ---- Composition ranking --------------------------------------------------

namespace {

constexpr std::uint64_t kRankLimit = std::uint64_t{1} << 63;

// C(n, k), saturating at kRankLimit.
std::uint64_t binom_sat(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned __int128>(n - k + i);
    r /= static_cast<unsigned __int128>(i);
    if (r >= kRankLimit) return kRankLimit;
  }
  return static_cast<std::uint64_t>(r);
}

// #compositions of total into `parts` nonnegative parts, saturating.
std::uint64_t comp_count_sat(std::int64_t total, std::int64_t parts) {
  if (parts == 0) return total == 0 ? 1 : 0;
  return binom_sat(total + parts - 1, parts - 1);
}

int bits_for(std::uint64_t values) {
  // minimal b with 2^b >= values
  if (values <= 1) return 0;
  return 64 - std::countl_zero(values - 1);
}

}  // namespace

std::uint64_t composition_count(std::int64_t total, std::int64_t parts) {
  const std::uint64_t c = comp_count_sat(total, parts);
  require(c < kRankLimit, ErrorCode::kRankOverflow, "composition count exceeds 63 bits");
  return c;
}

std::uint64_t composition_rank(std::span<const std::int64_t> counts) {
  std::int64_t remaining = 0;
  for (std::int64_t c : counts) remaining += c;
  require(composition_count(remaining, static_cast<std::int64_t>(counts.size())) < kRankLimit,
          ErrorCode::kRankOverflow, "rank space exceeds 63 bits");
  std::uint64_t rank = 0;
  const std::int64_t parts = static_cast<std::int64_t>(counts.size());
  for (std::int64_t i = 0; i < parts; ++i) {
    const std::int64_t tail = parts - 1 - i;
    for (std::int64_t v = 0; v < counts[static_cast<std::size_t>(i)]; ++v)
      rank += comp_count_sat(remaining - v, tail);
    remaining -= counts[static_cast<std::size_t>(i)];
  }
  return rank;
}

std::vector<std::int64_t> composition_unrank(std::uint64_t rank, std::int64_t total,
                                             std::int64_t parts) {
  require(rank < composition_count(total, parts), ErrorCode::kHeaderMismatch,
          "composition rank out of range");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(parts), 0);
  std::int64_t remaining = total;
  for (std::int64_t i = 0; i < parts; ++i) {
    const std::int64_t tail = parts - 1 - i;
    std::int64_t v = 0;
    for (;; ++v) {
      const std::uint64_t c = comp_count_sat(remaining - v, tail);
      if (rank < c) break;
      rank -= c;
    }
    counts[static_cast<std::size_t>(i)] = v;
    remaining -= v;
  }
  return counts;
}

// ---- Type header ----------------------------------------------------------

TypeHeaderInfo type_header_info(std::int64_t n, int block_len, int alphabet) {
  require(block_len >= 1 && n >= 1 && n % block_len == 0, ErrorCode::kLengthNotDivisible,
          "type header needs ell | n");
  const std::int64_t k = n / block_len;
  const std::int64_t parts = pow_int(alphabet, block_len);
  TypeHeaderInfo info;
  const std::uint64_t c = comp_count_sat(k, parts);
  if (c < kRankLimit) {
    info.rank_format = true;
    info.payload_bits = bits_for(c);
  } else {
    info.rank_format = false;
    info.payload_bits = static_cast<std::int64_t>(bits_for(static_cast<std::uint64_t>(k) + 1)) * parts;
  }
  info.total_bits = info.payload_bits + 1;
  return info;
}

Bitstream encode_type(const BlockDistribution& p, std::int64_t n) {
  require(p.counts.has_value(), ErrorCode::kInternal,
          "encode_type requires a count-backed distribution");
  require(p.n == n, ErrorCode::kLengthMismatch, "encode_type: n does not match distribution");
  const TypeHeaderInfo info = type_header_info(n, p.block_len, p.alphabet);
  Bitstream out;
  if (info.rank_format) {
    out.push_bit(0);
    const std::uint64_t rank = composition_rank(*p.counts);
    out.push_bits(rank, static_cast<int>(info.payload_bits));
  } else {
    out.push_bit(1);
    const int field = static_cast<int>(info.payload_bits / p.table_size());
    for (std::int64_t c : *p.counts) out.push_bits(static_cast<std::uint64_t>(c), field);
  }
  return out;
}

BlockDistribution decode_type(BitReader& reader, std::int64_t n, int block_len, int alphabet) {
  const TypeHeaderInfo info = type_header_info(n, block_len, alphabet);
  const std::int64_t k = n / block_len;
  const std::int64_t parts = pow_int(alphabet, block_len);
  const int flag = reader.read_bit();
  require(flag == (info.rank_format ? 0 : 1), ErrorCode::kHeaderMismatch,
          "type header format flag does not match parameters");
  std::vector<std::int64_t> counts;
  if (flag == 0) {
    const std::uint64_t rank = reader.read_bits(static_cast<int>(info.payload_bits));
    counts = composition_unrank(rank, k, parts);
  } else {
    const int field = static_cast<int>(info.payload_bits / parts);
    std::int64_t sum = 0;
    for (std::int64_t i = 0; i < parts; ++i) {
      counts.push_back(static_cast<std::int64_t>(reader.read_bits(field)));
      sum += counts.back();
    }
    require(sum == k, ErrorCode::kHeaderMismatch, "type counts do not sum to n/ell");
  }
  BlockDistribution d;
  d.block_len = block_len;
  d.alphabet = alphabet;
  d.n = n;
  d.probs.resize(static_cast<std::size_t>(parts));
  const double scale = static_cast<double>(block_len) / static_cast<double>(n);
  for (std::int64_t a = 0; a < parts; ++a)
    d.probs[static_cast<std::size_t>(a)] = static_cast<double>(counts[static_cast<std::size_t>(a)]) * scale;
  d.counts = std::move(counts);
  return d;
}

BlockDistribution decode_type(const Bitstream& bits, std::int64_t n, int block_len, int alphabet) {
  BitReader reader(bits);
  return decode_type(reader, n, block_len, alphabet);
}

}  // namespace wzis
