#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wzis {

// A binary codeword of length <= 63, MSB-first. bits holds the word in the
// low `length` positions, first transmitted bit at position length-1.
struct Codeword {
  std::uint64_t bits = 0;
  int length = 0;

  int bit(int i) const { return static_cast<int>((bits >> (length - 1 - i)) & 1u); }
  std::string str() const;

  friend bool operator==(const Codeword&, const Codeword&) = default;
};

// Orders by length, then by numeric value.
bool codeword_less(const Codeword& a, const Codeword& b);

Codeword codeword_from_string(const std::string& s);

struct KraftResult {
  bool pass = false;
  double sum = 0.0;
};

// pass iff the Kraft sum is <= 1 AND the list is prefix-free. An empty list
// passes (the decoder idles); an empty codeword passes only as the sole
// entry. Failure is a return value, never an exception.
KraftResult kraft_check(std::span<const Codeword> codewords);

// Immutable prefix code. Constructor enforces kraft_check and sorts the
// codewords canonically (length, then value).
class PrefixCode {
 public:
  PrefixCode() = default;  // empty code: decoder idles
  explicit PrefixCode(std::vector<Codeword> codewords);

  int size() const { return static_cast<int>(codewords_.size()); }
  bool empty() const { return codewords_.empty(); }
  const Codeword& at(int u) const { return codewords_[static_cast<std::size_t>(u)]; }
  int length(int u) const { return codewords_[static_cast<std::size_t>(u)].length; }
  const std::vector<Codeword>& codewords() const { return codewords_; }
  double kraft_sum() const { return kraft_sum_; }
  int max_length() const;

  // Index of a codeword, or -1 if absent.
  int find(const Codeword& w) const;

  friend bool operator==(const PrefixCode&, const PrefixCode&) = default;

 private:
  std::vector<Codeword> codewords_;
  double kraft_sum_ = 0.0;
};

// Every prefix-free set of 1..max_codewords codewords with lengths in
// 1..max_len, plus the singleton empty code. Canonically ordered,
// deterministic.
std::vector<PrefixCode> enumerate_prefix_codes(int max_codewords, int max_len);

// Complete code trees (Kraft sum exactly 1) with at most max_leaves leaves.
// The singleton empty code is the one-leaf tree. Canonically ordered.
std::vector<PrefixCode> enumerate_complete_trees(int max_leaves);

// Canonical prefix code with the given lengths (Kraft sum must be <= 1).
// Codewords are assigned in order of (length, position). A single length-0
// entry yields the empty codeword.
std::vector<Codeword> canonical_prefix_code(std::span<const int> lengths);

}  // namespace wzis
