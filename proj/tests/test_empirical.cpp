#include <doctest.h>

#include <cmath>
#include <tuple>
#include <vector>

#include "wzis/empirical.hpp"
#include "wzis/error.hpp"

using namespace wzis;

TEST_CASE("block_empirical examples") {
  // periodic input: every block is 01
  auto d = block_empirical(Sequence({0, 1, 0, 1, 0, 1, 0, 1}, 2), 2);
  CHECK(d.probs[1] == doctest::Approx(1.0));  // block id of (0,1) is 1
  CHECK(d.probs[0] == 0.0);

  d = block_empirical(Sequence({0, 0, 1, 1}, 2), 2);
  CHECK(d.probs[0] == doctest::Approx(0.5));
  CHECK(d.probs[3] == doctest::Approx(0.5));

  d = block_empirical(Sequence({0, 0, 0, 1, 1, 0, 1, 1}, 2), 2);
  for (int a = 0; a < 4; ++a) CHECK(d.probs[static_cast<std::size_t>(a)] == doctest::Approx(0.25));

  CHECK_THROWS_AS(block_empirical(Sequence({0, 1, 0}, 2), 2), Error);
}

TEST_CASE("join_with_channel examples") {
  auto d = block_empirical(Sequence({0, 0, 1, 1}, 2), 2);
  const auto id = join_with_channel(d, identity_channel(2));
  for (std::int64_t a = 0; a < 4; ++a)
    for (std::int64_t b = 0; b < 4; ++b)
      CHECK(id.joint[static_cast<std::size_t>(a * 4 + b)] ==
            doctest::Approx(a == b ? d.probs[static_cast<std::size_t>(a)] : 0.0));

  const auto uni = join_with_channel(d, validate_dmc({{0.5, 0.5}, {0.5, 0.5}}));
  for (std::int64_t a = 0; a < 4; ++a)
    for (std::int64_t b = 0; b < 4; ++b)
      CHECK(uni.joint[static_cast<std::size_t>(a * 4 + b)] ==
            doctest::Approx(d.probs[static_cast<std::size_t>(a)] / 4.0));

  BlockDistribution point;
  point.block_len = 1;
  point.alphabet = 2;
  point.probs = {1.0, 0.0};
  const auto bsc = join_with_channel(point, binary_symmetric_channel(0.1));
  CHECK(bsc.joint[0] == doctest::Approx(0.9));
  CHECK(bsc.joint[1] == doctest::Approx(0.1));

  // marginals recover the source within 1e-12
  for (std::int64_t a = 0; a < 4; ++a) {
    double sum = 0;
    for (std::int64_t b = 0; b < 4; ++b) sum += id.joint[static_cast<std::size_t>(a * 4 + b)];
    CHECK(std::abs(sum - d.probs[static_cast<std::size_t>(a)]) <= 1e-12);
  }
}

TEST_CASE("join_with_channel cap") {
  std::vector<double> pmf(2, 0.5);
  const auto d = product_block_distribution(pmf, 13);  // 2^13 blocks
  CHECK_THROWS_AS(join_with_channel(d, binary_symmetric_channel(0.1), 1 << 20), Error);
}

TEST_CASE("type header size example: n=16, ell=2, alpha=2") {
  const auto info = type_header_info(16, 2, 2);
  CHECK(info.rank_format);
  CHECK(info.payload_bits == 8);  // ceil(log2 C(11,3)) = ceil(log2 165)
  CHECK(info.total_bits == 9);
  // paper budget: ceil(alpha^ell * log2(n/ell+1)) = ceil(4 log2 9) = 13
  CHECK(info.payload_bits <= 13);
  CHECK(info.total_bits <= 13 + 1);
}

TEST_CASE("single-block type round-trips") {
  const Sequence x({1, 0}, 2);
  const auto d = block_empirical(x, 2);
  const Bitstream bits = encode_type(d, 2);
  const auto back = decode_type(bits, 2, 2, 2);
  CHECK(back.counts == d.counts);
}

TEST_CASE("exhaustive type round-trip over all compositions (k=4, parts=4)") {
  CHECK(composition_count(4, 4) == 35);
  int seen = 0;
  for (std::uint64_t rank = 0; rank < 35; ++rank) {
    const auto counts = composition_unrank(rank, 4, 4);
    CHECK(composition_rank(counts) == rank);
    // materialize a sequence with those 2-block counts over n=8
    std::vector<int> syms;
    for (std::size_t a = 0; a < 4; ++a)
      for (std::int64_t c = 0; c < counts[a]; ++c) {
        syms.push_back(static_cast<int>(a) / 2);
        syms.push_back(static_cast<int>(a) % 2);
      }
    const auto d = block_empirical(Sequence(syms, 2), 2);
    const Bitstream bits = encode_type(d, 8);
    CHECK(bits.bit_size() == type_header_info(8, 2, 2).total_bits);
    const auto back = decode_type(bits, 8, 2, 2);
    CHECK(back.counts == d.counts);
    ++seen;
  }
  CHECK(seen == 35);
}

TEST_CASE("header length never exceeds the paper budget plus the flag bit") {
  const std::vector<std::tuple<std::int64_t, int, int>> cases{
      {16, 2, 2}, {64, 2, 2}, {1024, 2, 2}, {27, 3, 3}, {1023, 3, 2}};
  for (const auto& [n, ell, alpha] : cases) {
    const auto info = type_header_info(n, ell, alpha);
    const double budget =
        std::ceil(std::pow(alpha, ell) * std::log2(static_cast<double>(n) / ell + 1));
    CHECK(static_cast<double>(info.total_bits) <= budget + 1);
  }
}

TEST_CASE("decode_type rejects out-of-range ranks") {
  Bitstream bits;
  bits.push_bit(0);
  bits.push_bits(200, 8);  // only 165 compositions exist
  CHECK_THROWS_AS(decode_type(bits, 16, 2, 2), Error);
}

TEST_CASE("rank overflow falls back to fixed fields") {
  // alpha^ell = 64 parts, n/ell = 2^20 blocks: C(k+63, 63) blows past 2^63
  const auto info = type_header_info(std::int64_t{6} << 20, 6, 2);
  CHECK_FALSE(info.rank_format);
  CHECK(info.payload_bits == 64 * 21);  // ceil(log2(2^20+1)) = 21 per field
}

TEST_CASE("product_block_distribution is an exact power") {
  const auto d = product_block_distribution(std::vector<double>{0.25, 0.75}, 2);
  CHECK(d.probs[0] == doctest::Approx(0.0625));
  CHECK(d.probs[1] == doctest::Approx(0.1875));
  CHECK(d.probs[2] == doctest::Approx(0.1875));
  CHECK(d.probs[3] == doctest::Approx(0.5625));
  CHECK_FALSE(d.counts.has_value());
}
