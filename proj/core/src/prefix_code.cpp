#include "wzis/prefix_code.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "wzis/error.hpp"

namespace wzis {

std::string Codeword::str() const {
  std::string s;
  for (int i = 0; i < length; ++i) s.push_back(bit(i) ? '1' : '0');
  return s;
}

bool codeword_less(const Codeword& a, const Codeword& b) {
  if (a.length != b.length) return a.length < b.length;
  return a.bits < b.bits;
}

Codeword codeword_from_string(const std::string& s) {
  Codeword w;
  for (char c : s) {
    require(c == '0' || c == '1', ErrorCode::kConfigError, "codeword must be binary");
    w.bits = (w.bits << 1) | static_cast<std::uint64_t>(c == '1');
    ++w.length;
  }
  return w;
}

namespace {

bool is_prefix_of(const Codeword& a, const Codeword& b) {
  // a is a (not necessarily proper) prefix of b
  if (a.length > b.length) return false;
  return (b.bits >> (b.length - a.length)) == a.bits;
}

}  // namespace

KraftResult kraft_check(std::span<const Codeword> codewords) {
  KraftResult r;
  for (const Codeword& w : codewords) r.sum += std::ldexp(1.0, -w.length);
  bool prefix_free = true;
  for (std::size_t i = 0; i < codewords.size() && prefix_free; ++i) {
    for (std::size_t j = 0; j < codewords.size(); ++j) {
      if (i == j) continue;
      if (is_prefix_of(codewords[i], codewords[j])) {
        prefix_free = false;
        break;
      }
    }
  }
  // Duplicates are caught by the prefix test (a word is a prefix of itself).
  r.pass = prefix_free && r.sum <= 1.0 + 1e-12;
  return r;
}

PrefixCode::PrefixCode(std::vector<Codeword> codewords) : codewords_(std::move(codewords)) {
  std::sort(codewords_.begin(), codewords_.end(), codeword_less);
  KraftResult r = kraft_check(codewords_);
  require(r.pass, ErrorCode::kConfigError, "codeword set violates Kraft/prefix-freeness");
  kraft_sum_ = r.sum;
}

int PrefixCode::max_length() const {
  int m = 0;
  for (const Codeword& w : codewords_) m = std::max(m, w.length);
  return m;
}

int PrefixCode::find(const Codeword& w) const {
  for (std::size_t i = 0; i < codewords_.size(); ++i)
    if (codewords_[i] == w) return static_cast<int>(i);
  return -1;
}

std::vector<PrefixCode> enumerate_prefix_codes(int max_codewords, int max_len) {
  require(max_codewords >= 1 && max_len >= 1, ErrorCode::kConfigError,
          "code family needs max_codewords >= 1 and max_len >= 1");
  // Candidate words of length 1..max_len in canonical order.
  std::vector<Codeword> candidates;
  for (int len = 1; len <= max_len; ++len)
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v)
      candidates.push_back(Codeword{v, len});

  std::vector<PrefixCode> out;
  out.emplace_back(std::vector<Codeword>{Codeword{0, 0}});  // singleton empty code

  std::vector<Codeword> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (!chosen.empty()) out.emplace_back(chosen);
    if (static_cast<int>(chosen.size()) == max_codewords) return;
    for (std::size_t i = start; i < candidates.size(); ++i) {
      bool ok = true;
      double sum = std::ldexp(1.0, -candidates[i].length);
      for (const Codeword& w : chosen) {
        if (is_prefix_of(w, candidates[i]) || is_prefix_of(candidates[i], w)) {
          ok = false;
          break;
        }
        sum += std::ldexp(1.0, -w.length);
      }
      if (!ok || sum > 1.0 + 1e-12) continue;
      chosen.push_back(candidates[i]);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);

  std::sort(out.begin(), out.end(), [](const PrefixCode& a, const PrefixCode& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (int i = 0; i < a.size(); ++i) {
      if (!(a.at(i) == b.at(i))) return codeword_less(a.at(i), b.at(i));
    }
    return false;
  });
  return out;
}

std::vector<PrefixCode> enumerate_complete_trees(int max_leaves) {
  require(max_leaves >= 1, ErrorCode::kConfigError, "max_leaves must be >= 1");
  // leaves_by_count[k] = all complete trees with exactly k leaves, each tree
  // as a codeword list.
  std::vector<std::vector<std::vector<Codeword>>> by_count(
      static_cast<std::size_t>(max_leaves) + 1);
  by_count[1].push_back({Codeword{0, 0}});
  for (int k = 2; k <= max_leaves; ++k) {
    for (int kl = 1; kl < k; ++kl) {
      const int kr = k - kl;
      for (const auto& left : by_count[static_cast<std::size_t>(kl)]) {
        for (const auto& right : by_count[static_cast<std::size_t>(kr)]) {
          std::vector<Codeword> t;
          for (const Codeword& w : left)
            t.push_back(Codeword{w.bits, w.length + 1});  // prefix 0
          for (const Codeword& w : right)
            t.push_back(Codeword{w.bits | (std::uint64_t{1} << w.length), w.length + 1});
          by_count[static_cast<std::size_t>(k)].push_back(std::move(t));
        }
      }
    }
  }
  std::vector<PrefixCode> out;
  for (int k = 1; k <= max_leaves; ++k)
    for (auto& t : by_count[static_cast<std::size_t>(k)]) out.emplace_back(std::move(t));
  // Different shapes give different codeword sets, so no dedup is needed;
  // sort within each leaf count for a canonical order.
  std::sort(out.begin(), out.end(), [](const PrefixCode& a, const PrefixCode& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (int i = 0; i < a.size(); ++i) {
      if (!(a.at(i) == b.at(i))) return codeword_less(a.at(i), b.at(i));
    }
    return false;
  });
  return out;
}

std::vector<Codeword> canonical_prefix_code(std::span<const int> lengths) {
  double sum = 0.0;
  for (int l : lengths) {
    require(l >= 0 && l <= 62, ErrorCode::kInternal, "codeword length out of range");
    sum += std::ldexp(1.0, -l);
  }
  require(sum <= 1.0 + 1e-9, ErrorCode::kInternal, "Shannon lengths violate Kraft");
  if (lengths.size() == 1 && lengths[0] == 0) return {Codeword{0, 0}};

  std::vector<int> order(lengths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (lengths[static_cast<std::size_t>(a)] != lengths[static_cast<std::size_t>(b)])
      return lengths[static_cast<std::size_t>(a)] < lengths[static_cast<std::size_t>(b)];
    return a < b;
  });

  std::vector<Codeword> out(lengths.size());
  std::uint64_t value = 0;
  int prev_len = lengths.empty() ? 0 : lengths[static_cast<std::size_t>(order[0])];
  require(lengths.size() <= 1 || prev_len >= 1, ErrorCode::kInternal,
          "empty codeword is only allowed as a singleton");
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int len = lengths[static_cast<std::size_t>(order[k])];
    value <<= (len - prev_len);
    out[static_cast<std::size_t>(order[k])] = Codeword{value, len};
    ++value;
    prev_len = len;
  }
  return out;
}

}  // namespace wzis
