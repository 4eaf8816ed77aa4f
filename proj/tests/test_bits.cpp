#include <doctest.h>

#include "wzis/bitstream.hpp"
#include "wzis/error.hpp"
#include "wzis/prefix_code.hpp"

using namespace wzis;

TEST_CASE("bitstream packs MSB-first") {
  Bitstream b;
  b.push_bit(1);
  b.push_bit(0);
  b.push_bits(0b1101, 4);
  CHECK(b.bit_size() == 6);
  CHECK(b.bytes().size() == 1);
  CHECK(b.bytes()[0] == 0b10110100);  // 10 1101 then zero padding

  BitReader r(b);
  CHECK(r.read_bit() == 1);
  CHECK(r.read_bits(5) == 0b01101);
  CHECK_THROWS_AS(r.read_bit(), Error);
}

TEST_CASE("kraft_check examples") {
  auto w = [](const char* s) { return codeword_from_string(s); };
  // lengths {1,2,2}: complete tree
  auto r = kraft_check(std::vector<Codeword>{w("0"), w("10"), w("11")});
  CHECK(r.pass);
  CHECK(r.sum == doctest::Approx(1.0));
  // lengths {1,1,2}: sum 1.25
  r = kraft_check(std::vector<Codeword>{w("0"), w("1"), w("01")});
  CHECK_FALSE(r.pass);
  CHECK(r.sum == doctest::Approx(1.25));
  // empty code list passes (decoder idles)
  r = kraft_check({});
  CHECK(r.pass);
  CHECK(r.sum == 0.0);
  // the empty codeword is fine alone, not with company
  r = kraft_check(std::vector<Codeword>{Codeword{0, 0}});
  CHECK(r.pass);
  r = kraft_check(std::vector<Codeword>{Codeword{0, 0}, w("0")});
  CHECK_FALSE(r.pass);
  // duplicates fail prefix-freeness
  r = kraft_check(std::vector<Codeword>{w("01"), w("01")});
  CHECK_FALSE(r.pass);
}

TEST_CASE("PrefixCode constructor enforces the invariants") {
  CHECK_THROWS_AS(PrefixCode({codeword_from_string("0"), codeword_from_string("01")}), Error);
  const PrefixCode c({codeword_from_string("10"), codeword_from_string("0")});
  CHECK(c.size() == 2);
  CHECK(c.at(0).str() == "0");  // canonical order: shorter first
  CHECK(c.at(1).str() == "10");
  CHECK(c.find(codeword_from_string("10")) == 1);
  CHECK(c.find(codeword_from_string("11")) == -1);
}

TEST_CASE("enumerate_prefix_codes counts") {
  // alpha=2, L=1: {empty}, {0}, {1}, {0,1}
  CHECK(enumerate_prefix_codes(2, 1).size() == 4);
  // alpha=2, L=2: 1 empty + 6 singletons + 11 prefix-free pairs
  const auto family = enumerate_prefix_codes(2, 2);
  CHECK(family.size() == 18);
  for (const auto& c : family) {
    CHECK(kraft_check(c.codewords()).pass);
    CHECK(c.size() <= 2);
  }
}

TEST_CASE("enumerate_complete_trees matches Catalan counts") {
  CHECK(enumerate_complete_trees(1).size() == 1);
  CHECK(enumerate_complete_trees(2).size() == 2);   // {e}, {0,1}
  CHECK(enumerate_complete_trees(3).size() == 4);   // + {0,10,11}, {1,00,01}
  CHECK(enumerate_complete_trees(4).size() == 9);   // 1+1+2+5
  for (const auto& t : enumerate_complete_trees(4)) {
    const auto r = kraft_check(t.codewords());
    CHECK(r.pass);
    CHECK(r.sum == doctest::Approx(1.0));
  }
}

TEST_CASE("canonical_prefix_code") {
  const auto a = canonical_prefix_code(std::vector<int>{2, 2, 2});
  CHECK(a[0].str() == "00");
  CHECK(a[1].str() == "01");
  CHECK(a[2].str() == "10");
  const auto b = canonical_prefix_code(std::vector<int>{2, 1, 2});
  CHECK(b[1].str() == "0");
  CHECK(b[0].str() == "10");
  CHECK(b[2].str() == "11");
  const auto c = canonical_prefix_code(std::vector<int>{0});
  CHECK(c[0].length == 0);
  CHECK_THROWS_AS(canonical_prefix_code(std::vector<int>{1, 1, 1}), Error);
}
