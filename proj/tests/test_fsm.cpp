#include <doctest.h>

#include <cmath>

#include "wzis/error.hpp"
#include "wzis/fsm.hpp"
#include "wzis/rng.hpp"

using namespace wzis;

namespace {

PrefixCode bits01() { return PrefixCode({codeword_from_string("0"), codeword_from_string("1")}); }
PrefixCode idle() { return PrefixCode({Codeword{0, 0}}); }

FsmEncoder verbatim_encoder() {
  FsmEncoder e;
  e.state_count = 1;
  e.codes = {bits01()};
  e.code_label = {0};
  e.output = {{0, 1}};
  e.next_state = {{0, 0}};
  return e;
}

FsmEncoder idle_encoder() {
  FsmEncoder e;
  e.state_count = 1;
  e.codes = {idle()};
  e.code_label = {0};
  e.output = {{0, 0}};
  e.next_state = {{0, 0}};
  return e;
}

// decoder with one state; recon[u][y] given as a 2x2 table
FsmDecoder simple_decoder(std::vector<std::vector<int>> recon_uy, int delay = 0) {
  FsmDecoder d;
  d.state_count = 1;
  d.delay = delay;
  d.parse_state_count = 1;
  d.parse_of = {0};
  d.codes = {bits01()};
  d.parse_next = {{0, 0}};
  d.recon = {std::move(recon_uy)};
  d.next = {{{0, 0}, {0, 0}}};
  return d;
}

FsmDecoder idle_decoder(std::vector<int> recon_y, int delay = 0) {
  FsmDecoder d;
  d.state_count = 1;
  d.delay = delay;
  d.parse_state_count = 1;
  d.parse_of = {0};
  d.codes = {idle()};
  d.parse_next = {{0}};
  d.recon = {{std::move(recon_y)}};
  d.next = {{{0, 0}}};
  return d;
}

double mc_expected(const Sequence& x, const FsmEncoder& enc, const FsmDecoder& dec,
                   const Channel& ch, const DistortionMatrix& rho, int samples, Seed seed) {
  const auto u = fsm_encode(x, enc);
  double total = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Sequence y = sample_side_info(x, ch, derive_seed(seed, "mc", static_cast<std::uint64_t>(s)));
    total += average_distortion(x, fsm_decode(u.codewords, y, dec), rho);
  }
  return total / samples;
}

}  // namespace

TEST_CASE("fsm_encode verbatim and idle") {
  const Sequence x({0, 1, 1, 0}, 2);
  const auto r = fsm_encode(x, verbatim_encoder());
  CHECK(r.total_bits == 4);
  CHECK(r.codewords[0].str() == "0");
  CHECK(r.codewords[1].str() == "1");

  const auto z = fsm_encode(x, idle_encoder());
  CHECK(z.total_bits == 0);
  for (const auto& w : z.codewords) CHECK(w.length == 0);
}

TEST_CASE("fsm_encode two-state parity machine emits on even steps only") {
  FsmEncoder e;
  e.state_count = 2;
  e.codes = {bits01(), idle()};
  e.code_label = {0, 1};
  e.output = {{0, 1}, {0, 0}};
  e.next_state = {{1, 1}, {0, 0}};
  e.check(2);
  const auto r = fsm_encode(Sequence({0, 1, 0, 1}, 2), e);
  CHECK(r.total_bits == 2);
  CHECK(r.codewords[0].length == 1);
  CHECK(r.codewords[1].length == 0);
  CHECK(r.codewords[2].length == 1);
  CHECK(r.codewords[3].length == 0);
}

TEST_CASE("fsm_decode examples") {
  // d=0 identity on u
  const FsmDecoder id = simple_decoder({{0, 0}, {1, 1}});
  const Sequence y({0, 1, 0, 1}, 2);
  std::vector<Codeword> u = {codeword_from_string("0"), codeword_from_string("1"),
                             codeword_from_string("1"), codeword_from_string("0")};
  CHECK(fsm_decode(u, y, id).symbols() == std::vector<int>{0, 1, 1, 0});

  // d=0 pass-through of y, idling code
  const FsmDecoder passy = idle_decoder({0, 1});
  std::vector<Codeword> eps(3, Codeword{0, 0});
  CHECK(fsm_decode(eps, Sequence({1, 1, 1}, 2), passy).symbols() == std::vector<int>{1, 1, 1});

  // d=1 identity on u: shifted output plus pad 0
  const FsmDecoder late = simple_decoder({{0, 0}, {1, 1}}, 1);
  std::vector<Codeword> u3 = {codeword_from_string("0"), codeword_from_string("1"),
                              codeword_from_string("1")};
  CHECK(fsm_decode(u3, Sequence({0, 0, 0}, 2), late).symbols() == std::vector<int>{1, 1, 0});

  // unknown codeword
  std::vector<Codeword> bad = {codeword_from_string("00"), codeword_from_string("1"),
                               codeword_from_string("1")};
  CHECK_THROWS_AS(fsm_decode(bad, Sequence({0, 0, 0}, 2), late), Error);
}

TEST_CASE("parse_bitstream round trips") {
  const Sequence y({0, 1, 0, 1}, 2);
  Bitstream b;
  b.push_bits(0b0110, 4);
  const auto u = parse_bitstream(b, y, simple_decoder({{0, 0}, {1, 1}}));
  CHECK(u.size() == 4);
  CHECK(u[0].str() == "0");
  CHECK(u[1].str() == "1");
  CHECK(u[2].str() == "1");
  CHECK(u[3].str() == "0");

  // idling decoder consumes zero bits
  Bitstream empty;
  const auto ue = parse_bitstream(empty, Sequence({0, 0, 0}, 2), idle_decoder({0, 0}));
  CHECK(ue.size() == 3);
  for (const auto& w : ue) CHECK(w.length == 0);

  // trailing garbage fails
  Bitstream extra;
  extra.push_bits(0b01101, 5);
  CHECK_THROWS_AS(parse_bitstream(extra, y, simple_decoder({{0, 0}, {1, 1}})), Error);
}

TEST_CASE("two-state machine encode/parse identity on a random input") {
  FsmEncoder e;
  e.state_count = 2;
  e.codes = {PrefixCode({codeword_from_string("0"), codeword_from_string("10")}), bits01()};
  e.code_label = {0, 1};
  e.output = {{0, 1}, {1, 0}};
  e.next_state = {{1, 0}, {0, 1}};
  e.check(2);

  FsmDecoder d;
  d.state_count = 2;
  d.delay = 0;
  d.parse_state_count = 2;
  d.parse_of = {0, 1};
  d.codes = e.codes;
  d.parse_next = {{1, 0}, {0, 1}};
  d.recon = {{{0, 0}, {1, 1}}, {{0, 1}, {1, 0}}};
  d.next = {{{1, 1}, {0, 0}}, {{0, 0}, {1, 1}}};
  d.check(2, 2);

  Rng rng(64);
  std::vector<int> xs(64);
  for (auto& v : xs) v = static_cast<int>(rng.next_below(2));
  const Sequence x(xs, 2);
  const auto enc = fsm_encode(x, e);
  const Bitstream packed = concat_codewords(enc.codewords);
  const auto parsed = parse_bitstream(packed, x, d);
  REQUIRE(parsed.size() == enc.codewords.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) CHECK(parsed[i] == enc.codewords[i]);
}

TEST_CASE("expected_distortion_exact closed forms") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  const Channel bsc = binary_symmetric_channel(0.2);
  const Sequence x({0, 0, 1, 0, 1, 1, 1, 0}, 2);

  // decoder always outputs 0: distortion = fraction of ones
  const FsmDecoder zero = idle_decoder({0, 0});
  CHECK(expected_distortion_exact(x, idle_encoder(), zero, bsc, ham) == doctest::Approx(0.5));

  // identity channel, pass-through-y decoder: zero distortion
  const FsmDecoder passy = idle_decoder({0, 1});
  CHECK(expected_distortion_exact(x, idle_encoder(), passy, identity_channel(2), ham) ==
        doctest::Approx(0.0));

  // BSC(0.2), pass-through-y: exactly the crossover probability
  CHECK(expected_distortion_exact(x, idle_encoder(), passy, bsc, ham) == doctest::Approx(0.2));
}

TEST_CASE("exact DP agrees with Monte Carlo") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  const Channel bsc = binary_symmetric_channel(0.3);
  Rng rng(11);
  std::vector<int> xs(24);
  for (auto& v : xs) v = static_cast<int>(rng.next_below(2));
  const Sequence x(xs, 2);

  // a 2-state decoder that remembers the previous y and votes with delay 1
  FsmDecoder d;
  d.state_count = 2;
  d.delay = 1;
  d.parse_state_count = 1;
  d.parse_of = {0, 0};
  d.codes = {idle()};
  d.parse_next = {{0}};
  d.recon = {{{0, 1}}, {{1, 1}}};
  d.next = {{{0, 1}}, {{0, 1}}};
  d.check(2, 2);

  const double exact = expected_distortion_exact(x, idle_encoder(), d, bsc, ham);
  const int samples = 10000;
  const double mc = mc_expected(x, idle_encoder(), d, bsc, ham, samples, 321);
  // 4 standard errors with a conservative per-sample variance bound of 1/4
  const double se = 0.5 / std::sqrt(static_cast<double>(samples));
  CHECK(std::abs(exact - mc) <= 4 * se);
}

TEST_CASE("pads charge the true distortion of symbol 0") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  const Sequence x({1, 1, 1, 1}, 2);
  // delay 2, decoder outputs x-hat = 1 always: only pads miss
  FsmDecoder d = idle_decoder({1, 1}, 2);
  const double v = expected_distortion_exact(x, idle_encoder(), d, identity_channel(2), ham);
  CHECK(v == doctest::Approx(0.5));  // 2 pad positions of 4 are wrong
}

TEST_CASE("machine keys are stable and distinguish tables") {
  const FsmDecoder a = simple_decoder({{0, 0}, {1, 1}});
  const FsmDecoder b = simple_decoder({{0, 0}, {1, 0}});
  CHECK(machine_key(a) == machine_key(a));
  CHECK(machine_key(a) != machine_key(b));
  CHECK(machine_key(verbatim_encoder()) != machine_key(idle_encoder()));
}
