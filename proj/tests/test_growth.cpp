#include <doctest.h>

#include <cmath>

#include "wzis/error.hpp"
#include "wzis/fsm.hpp"
#include "wzis/growth.hpp"

using namespace wzis;

namespace {

double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace

TEST_CASE("maxent examples") {
  const std::vector<double> ham{0.0, 1.0};
  // uniform already meets the constraint at delta = 0.5
  auto s = maxent_distribution(ham, 0.5);
  CHECK(s.mu == 0.0);
  CHECK(s.pmf[0] == doctest::Approx(0.5));
  CHECK(s.phi == doctest::Approx(1.0));
  // delta = 0: point mass
  s = maxent_distribution(ham, 0.0);
  CHECK(s.pmf[0] == doctest::Approx(1.0));
  CHECK(s.phi == doctest::Approx(0.0));
  // delta = 0.11: phi = h2(0.11) via bisection
  s = maxent_distribution(ham, 0.11);
  CHECK(s.phi == doctest::Approx(h2(0.11)).epsilon(1e-6));
  CHECK(s.pmf[1] == doctest::Approx(0.11).epsilon(1e-9));
  // infeasible
  CHECK_THROWS_AS(maxent_distribution(std::vector<double>{0.5, 1.0}, 0.1), Error);
}

TEST_CASE("maxent moment constraint and concavity in delta") {
  const std::vector<double> rho0{0.0, 1.0, 3.0};
  double prev_phi = -1.0, prev_slope = 1e100;
  for (double delta = 0.05; delta <= 1.3; delta += 0.05) {
    const auto s = maxent_distribution(rho0, delta);
    double mean = 0.0;
    for (std::size_t i = 0; i < rho0.size(); ++i) mean += s.pmf[i] * rho0[i];
    CHECK(mean <= delta + 1e-9);
    CHECK(s.phi >= prev_phi - 1e-9);  // nondecreasing
    if (prev_phi >= 0.0) {
      const double slope = (s.phi - prev_phi) / 0.05;
      CHECK(slope <= prev_slope + 1e-6);  // concave
      prev_slope = slope;
    }
    prev_phi = s.phi;
  }
}

TEST_CASE("decoder description bit counts") {
  CHECK(decoder_description_bits(2, 2, 2, 2) == 18);
  CHECK(decoder_description_bits(1, 2, 2, 2) == 5);
  // gamma = 1 kills the middle term
  const auto h = header_budget(3, 2, 2, 1);
  CHECK(h.recon_bits == 0);
  CHECK(h.total_bits == h.tree_bits + h.next_bits);
  // K = sum (k-1)! for alpha = 3 is 1 + 1 + 2 = 4
  CHECK(header_budget(1, 3, 2, 2).tree_count == 4);
}

TEST_CASE("theta sweep monotonicity") {
  std::vector<std::uint64_t> ns{1000, 10'000, 100'000, 1'000'000, 10'000'000};
  const auto low = theta_sweep(0.5, ns, 2, 2, 2);
  for (std::size_t i = 1; i < low.size(); ++i)
    CHECK(low[i].bits_per_symbol < low[i - 1].bits_per_symbol);
  const auto high = theta_sweep(1.5, ns, 2, 2, 2);
  for (std::size_t i = 1; i < high.size(); ++i)
    CHECK(high[i].bits_per_symbol > high[i - 1].bits_per_symbol);
  const auto crit = theta_sweep(1.0, ns, 2, 2, 2);
  for (std::size_t i = 1; i < crit.size(); ++i)
    CHECK(crit[i].bits_per_symbol > crit[i - 1].bits_per_symbol);  // M log M at M = n
  // exact powers: floor(1e4^1.5) = 1e6
  CHECK(high[1].states == 1'000'000);
  CHECK(low[3].states == 1000);
}

TEST_CASE("wrapper succeeds with perfect side information at zero rate") {
  SearchGrid grid;
  grid.max_states = 1;
  grid.max_delay = 0;
  grid.max_len = 2;
  const Sequence x({0, 1, 1, 0, 1, 0}, 2);
  const auto res = wrapper_encode(x, 0.0, 0.0, grid, identity_channel(2),
                                  DistortionMatrix::hamming(2));
  REQUIRE(res.has_value());
  CHECK(res->header_bits == 5);
  CHECK(res->payload_bits == 0);
  CHECK(res->bits.bit_size() == 5);
  CHECK(res->witness.distortion == 0.0);
}

TEST_CASE("wrapper reports not-achievable when side information is useless") {
  SearchGrid grid;
  grid.max_states = 1;
  grid.max_delay = 0;
  grid.max_len = 2;
  const Sequence x({0, 1, 1, 0}, 2);
  const Channel useless = validate_dmc({{0.5, 0.5}, {0.5, 0.5}});
  const auto res = wrapper_encode(x, 0.0, 0.0, grid, useless, DistortionMatrix::hamming(2));
  CHECK_FALSE(res.has_value());
}

TEST_CASE("wrapper agrees with the restricted search and counts bits exactly") {
  SearchGrid grid;
  grid.max_states = 2;
  grid.max_delay = 1;
  grid.max_len = 2;
  grid.budget = 2'000'000'000ULL;
  const Channel ch = binary_symmetric_channel(0.2);
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  Rng rng(19);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<int> xs(12);
    for (auto& v : xs) v = static_cast<int>(rng.next_below(2));
    const Sequence x(xs, 2);
    const double rate = 0.5;
    const auto feasibility = operational_optimum(x, rate, wrapper_grid(grid), ch, ham);
    for (double delta : {0.05, 0.2, 0.5}) {
      const auto res = wrapper_encode(x, rate, delta, grid, ch, ham);
      CHECK(res.has_value() == (feasibility.feasible && feasibility.distortion <= delta));
      if (res) {
        CHECK(static_cast<std::uint64_t>(res->header_bits) ==
              decoder_description_bits(2, 2, 2, 2));
        CHECK(res->bits.bit_size() ==
              static_cast<std::size_t>(res->header_bits + res->payload_bits));
      }
    }
  }
}

TEST_CASE("decoder description round-trips table-identically") {
  SearchGrid grid;
  grid.max_states = 2;
  grid.max_delay = 1;
  grid.max_len = 2;
  grid.budget = 2'000'000'000ULL;
  const Channel ch = binary_symmetric_channel(0.1);
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  const Sequence x({0, 0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0}, 2);
  const auto res = wrapper_encode(x, 1.0, 0.5, grid, ch, ham);
  REQUIRE(res.has_value());
  BitReader reader(res->bits);
  const FsmDecoder back = decode_decoder_description(reader, wrapper_grid(grid),
                                                     res->witness.decoder.delay);
  CHECK(machine_key(back) == machine_key(res->witness.decoder));
  // behavior preserved too
  CHECK(expected_distortion_exact(x, res->witness.encoder, back, ch, ham) ==
        res->witness.distortion);
}

TEST_CASE("converse process generator") {
  const std::vector<double> ham{0.0, 1.0};
  // delta = 0: x is a concatenation of codebook members
  {
    const auto s = converse_process_generate(8, 4, 0.5, 0.0, ham, 7);
    for (int b = 0; b < 4; ++b) {
      const Sequence& u = s.codebook[static_cast<std::size_t>(s.chosen[static_cast<std::size_t>(b)])];
      for (int j = 0; j < 8; ++j) CHECK(s.x[b * 8 + j] == u[j]);
    }
  }
  // R = 0: a single codeword
  {
    const auto s = converse_process_generate(8, 4, 0.0, 0.11, ham, 8);
    CHECK(s.codebook.size() == 1);
  }
  // noise weight concentrates around delta
  {
    double mean = 0.0;
    const int seeds = 100;
    for (int seed = 0; seed < seeds; ++seed) {
      const auto s = converse_process_generate(8, 32, 0.5, 0.11, ham, 1000 + seed);
      double weight = 0.0;
      for (int b = 0; b < 32; ++b) {
        const Sequence& u = s.codebook[static_cast<std::size_t>(s.chosen[static_cast<std::size_t>(b)])];
        for (int j = 0; j < 8; ++j) weight += (s.x[b * 8 + j] != u[j]) ? 1.0 : 0.0;
      }
      mean += weight / (32.0 * 8.0);
    }
    mean /= seeds;
    CHECK(mean >= 0.06);
    CHECK(mean <= 0.16);
  }
  // codebook cap
  CHECK_THROWS_AS(converse_process_generate(30, 2, 1.0, 0.11, ham, 5), Error);
}
