#include "wzis/fsm_search.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <string>

#include "wzis/error.hpp"
#include "wzis/prefix_code.hpp"

namespace wzis {
namespace {

constexpr std::uint64_t kCountCap = std::numeric_limits<std::uint64_t>::max() / 4;

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kCountCap / b) return kCountCap;
  return a * b;
}

std::uint64_t add_sat(std::uint64_t a, std::uint64_t b) {
  return (a > kCountCap - b) ? kCountCap : a + b;
}

std::uint64_t pow_sat(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = mul_sat(r, base);
  return r;
}

// Mixed-radix odometer; returns false after the last combination.
bool advance_odometer(std::vector<int>& digits, const std::vector<int>& radix) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < radix[i]) return true;
    digits[i] = 0;
  }
  return false;
}

std::vector<PrefixCode> build_family(const SearchGrid& grid) {
  return grid.complete_codes_only ? enumerate_complete_trees(grid.alpha)
                                  : enumerate_prefix_codes(grid.alpha, grid.max_len);
}

// One per-parse-state choice: a code plus its codeword-driven transition row.
struct StateOption {
  int code_idx = 0;
  std::vector<int> row;  // g''[.] per codeword, values < mpp
};

std::vector<StateOption> parse_state_options(const std::vector<PrefixCode>& family, int mpp) {
  std::vector<StateOption> opts;
  for (std::size_t ci = 0; ci < family.size(); ++ci) {
    const int k = family[ci].size();
    std::vector<int> row(static_cast<std::size_t>(k), 0);
    for (;;) {
      opts.push_back({static_cast<int>(ci), row});
      int pos = k - 1;
      while (pos >= 0) {
        if (++row[static_cast<std::size_t>(pos)] < mpp) break;
        row[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  return opts;
}

struct ParseMachine {
  int mpp = 1;
  std::vector<int> code_idx;            // per parse state
  std::vector<std::vector<int>> next;   // g''[ss][u]
  std::vector<int> ksize;               // codewords per parse state
};

ParseMachine assemble_pm(const std::vector<PrefixCode>& family,
                         const std::vector<StateOption>& opts, const std::vector<int>& digits) {
  ParseMachine pm;
  pm.mpp = static_cast<int>(digits.size());
  for (int d : digits) {
    const StateOption& o = opts[static_cast<std::size_t>(d)];
    pm.code_idx.push_back(o.code_idx);
    pm.next.push_back(o.row);
    pm.ksize.push_back(family[static_cast<std::size_t>(o.code_idx)].size());
  }
  return pm;
}

// Surjections {0..m-1} -> {0..k-1} in first-occurrence canonical form.
std::vector<std::vector<int>> canonical_surjections(int m, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(m), 0);
  auto rec = [&](auto&& self, int pos, int used) -> void {
    if (pos == m) {
      if (used == k) out.push_back(cur);
      return;
    }
    const int limit = std::min(used + 1, k);
    for (int v = 0; v < limit; ++v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, std::max(used, v + 1));
    }
  };
  // position 0 is pinned to label 0
  cur[0] = 0;
  rec(rec, 1, 1);
  if (m == 0) out.clear();
  return out;
}

std::vector<std::vector<int>> label_classes(const std::vector<int>& labels, int k) {
  std::vector<std::vector<int>> cls(static_cast<std::size_t>(k));
  for (std::size_t s = 0; s < labels.size(); ++s)
    cls[static_cast<std::size_t>(labels[s])].push_back(static_cast<int>(s));
  return cls;
}

// ---- materialization ------------------------------------------------------

FsmEncoder make_encoder(const std::vector<PrefixCode>& family, const ParseMachine& pm, int m_e,
                        const std::vector<int>& p, const std::vector<std::vector<int>>& f_tab,
                        const std::vector<std::vector<int>>& g_tab) {
  FsmEncoder e;
  e.state_count = m_e;
  for (int ss = 0; ss < pm.mpp; ++ss)
    e.codes.push_back(family[static_cast<std::size_t>(pm.code_idx[static_cast<std::size_t>(ss)])]);
  e.code_label = p;
  e.output = f_tab;
  e.next_state = g_tab;
  return e;
}

FsmDecoder make_decoder(const std::vector<PrefixCode>& family, const ParseMachine& pm, int m_d,
                        const std::vector<int>& parse_of,
                        const std::vector<std::vector<std::vector<int>>>& recon,
                        const std::vector<std::vector<std::vector<int>>>& next, int delay) {
  FsmDecoder d;
  d.state_count = m_d;
  d.delay = delay;
  d.parse_state_count = pm.mpp;
  d.parse_of = parse_of;
  for (int ss = 0; ss < pm.mpp; ++ss)
    d.codes.push_back(family[static_cast<std::size_t>(pm.code_idx[static_cast<std::size_t>(ss)])]);
  d.parse_next = pm.next;
  d.recon = recon;
  d.next = next;
  return d;
}

// ---- canonicality ---------------------------------------------------------

FsmEncoder relabel_encoder(const FsmEncoder& e, const std::vector<int>& perm) {
  FsmEncoder r = e;
  for (int s = 0; s < e.state_count; ++s) {
    const int ns = perm[static_cast<std::size_t>(s)];
    r.code_label[static_cast<std::size_t>(ns)] = e.code_label[static_cast<std::size_t>(s)];
    r.output[static_cast<std::size_t>(ns)] = e.output[static_cast<std::size_t>(s)];
    r.next_state[static_cast<std::size_t>(ns)] = e.next_state[static_cast<std::size_t>(s)];
    for (int& t : r.next_state[static_cast<std::size_t>(ns)]) t = perm[static_cast<std::size_t>(t)];
  }
  return r;
}

FsmDecoder relabel_decoder(const FsmDecoder& d, const std::vector<int>& perm) {
  FsmDecoder r = d;
  std::vector<int> parse_tmp(static_cast<std::size_t>(d.state_count));
  for (int s = 0; s < d.state_count; ++s) {
    const int ns = perm[static_cast<std::size_t>(s)];
    parse_tmp[static_cast<std::size_t>(ns)] = d.parse_of[static_cast<std::size_t>(s)];
    r.recon[static_cast<std::size_t>(ns)] = d.recon[static_cast<std::size_t>(s)];
    r.next[static_cast<std::size_t>(ns)] = d.next[static_cast<std::size_t>(s)];
    for (auto& urow : r.next[static_cast<std::size_t>(ns)])
      for (int& t : urow) t = perm[static_cast<std::size_t>(t)];
  }
  // renormalize parse labels to first-occurrence order
  std::vector<int> lbl_map(static_cast<std::size_t>(d.parse_state_count), -1);
  int used = 0;
  for (int s = 0; s < d.state_count; ++s) {
    int& m = lbl_map[static_cast<std::size_t>(parse_tmp[static_cast<std::size_t>(s)])];
    if (m < 0) m = used++;
  }
  r.parse_of.resize(static_cast<std::size_t>(d.state_count));
  for (int s = 0; s < d.state_count; ++s)
    r.parse_of[static_cast<std::size_t>(s)] = lbl_map[static_cast<std::size_t>(parse_tmp[static_cast<std::size_t>(s)])];
  r.codes.assign(static_cast<std::size_t>(d.parse_state_count), PrefixCode{});
  r.parse_next.assign(static_cast<std::size_t>(d.parse_state_count), {});
  for (int ss = 0; ss < d.parse_state_count; ++ss) {
    const int nss = lbl_map[static_cast<std::size_t>(ss)];
    require(nss >= 0, ErrorCode::kInternal, "relabeled decoder dropped a parse state");
    r.codes[static_cast<std::size_t>(nss)] = d.codes[static_cast<std::size_t>(ss)];
    auto row = d.parse_next[static_cast<std::size_t>(ss)];
    for (int& t : row) t = lbl_map[static_cast<std::size_t>(t)];
    r.parse_next[static_cast<std::size_t>(nss)] = std::move(row);
  }
  return r;
}

template <typename Machine, typename Relabel>
bool is_canonical(const Machine& m, int states, Relabel&& relabel) {
  if (states <= 2) return true;
  std::vector<int> perm(static_cast<std::size_t>(states));
  std::iota(perm.begin(), perm.end(), 0);
  const std::string key0 = machine_key(m);
  // permutations fixing state 0 (the initial state)
  while (std::next_permutation(perm.begin() + 1, perm.end())) {
    if (machine_key(relabel(m, perm)) < key0) return false;
  }
  return true;
}

// ---- counting -------------------------------------------------------------

struct PmCounts {
  std::uint64_t encoders = 0;  // summed over m_e and labelings
  std::uint64_t decoders = 0;  // summed over m_d, parse_of, g', f', delay
};

PmCounts count_for_pm(const SearchGrid& grid, const ParseMachine& pm) {
  PmCounts c;
  // encoders
  for (int m_e = 1; m_e <= grid.max_states; ++m_e) {
    std::vector<int> p(static_cast<std::size_t>(m_e), 0);
    std::vector<int> radix(static_cast<std::size_t>(m_e), pm.mpp);
    radix[0] = 1;  // p[0] = 0
    std::vector<int> digits(static_cast<std::size_t>(m_e), 0);
    do {
      for (int s = 0; s < m_e; ++s) p[static_cast<std::size_t>(s)] = digits[static_cast<std::size_t>(s)];
      auto cls = label_classes(p, pm.mpp);
      std::uint64_t enc = 1;
      for (int s = 0; s < m_e && enc > 0; ++s) {
        const int lbl = p[static_cast<std::size_t>(s)];
        std::uint64_t per_cell = 0;
        for (int u = 0; u < pm.ksize[static_cast<std::size_t>(lbl)]; ++u)
          per_cell = add_sat(per_cell,
                             cls[static_cast<std::size_t>(pm.next[static_cast<std::size_t>(lbl)][static_cast<std::size_t>(u)])].size());
        enc = mul_sat(enc, pow_sat(per_cell, static_cast<std::uint64_t>(grid.alpha)));
      }
      c.encoders = add_sat(c.encoders, enc);
    } while (advance_odometer(digits, radix));
  }
  // decoders
  for (int m_d = pm.mpp; m_d <= grid.max_states; ++m_d) {
    for (const auto& parse_of : canonical_surjections(m_d, pm.mpp)) {
      auto cls = label_classes(parse_of, pm.mpp);
      std::uint64_t dec = 1;
      std::uint64_t fbits = 0;  // number of f' cells
      for (int s = 0; s < m_d; ++s) {
        const int lbl = parse_of[static_cast<std::size_t>(s)];
        for (int u = 0; u < pm.ksize[static_cast<std::size_t>(lbl)]; ++u) {
          const std::uint64_t cs =
              cls[static_cast<std::size_t>(pm.next[static_cast<std::size_t>(lbl)][static_cast<std::size_t>(u)])].size();
          dec = mul_sat(dec, pow_sat(cs, grid.y_invariant_next ? 1u : static_cast<std::uint64_t>(grid.beta)));
          fbits += static_cast<std::uint64_t>(grid.beta);
        }
      }
      dec = mul_sat(dec, pow_sat(static_cast<std::uint64_t>(grid.gamma), fbits));
      dec = mul_sat(dec, static_cast<std::uint64_t>(grid.max_delay) + 1);
      c.decoders = add_sat(c.decoders, dec);
    }
  }
  return c;
}

template <typename Fn>
void for_each_pm(const SearchGrid& grid, const std::vector<PrefixCode>& family, Fn&& fn) {
  for (int mpp = 1; mpp <= grid.max_states; ++mpp) {
    const auto opts = parse_state_options(family, mpp);
    std::vector<int> digits(static_cast<std::size_t>(mpp), 0);
    const std::vector<int> radix(static_cast<std::size_t>(mpp), static_cast<int>(opts.size()));
    do {
      fn(assemble_pm(family, opts, digits));
    } while (advance_odometer(digits, radix));
  }
}

}  // namespace

std::uint64_t pair_count(const SearchGrid& grid) {
  require(grid.max_states >= 1 && grid.max_delay >= 0 && grid.max_len >= 1,
          ErrorCode::kConfigError, "grid requires M >= 1, d >= 0, L_max >= 1");
  const auto family = build_family(grid);
  std::uint64_t total = 0;
  for_each_pm(grid, family, [&](const ParseMachine& pm) {
    const PmCounts c = count_for_pm(grid, pm);
    total = add_sat(total, mul_sat(c.encoders, c.decoders));
  });
  return total;
}

namespace {

void check_budget(const SearchGrid& grid) {
  const std::uint64_t estimate = pair_count(grid);
  require(estimate <= grid.budget, ErrorCode::kBudgetExceeded,
          "enumeration size estimate " + std::to_string(estimate) + " exceeds budget " +
              std::to_string(grid.budget));
}

// Iterates encoder candidates on a parse machine. fn(p, f_tab, g_tab,
// u_of_cell) is called per candidate with tables indexed [state][symbol].
template <typename Fn>
void for_each_encoder(const SearchGrid& grid, const ParseMachine& pm, int m_e, Fn&& fn) {
  std::vector<int> p(static_cast<std::size_t>(m_e), 0);
  std::vector<int> p_radix(static_cast<std::size_t>(m_e), pm.mpp);
  p_radix[0] = 1;
  std::vector<int> p_digits(static_cast<std::size_t>(m_e), 0);
  do {
    for (int s = 0; s < m_e; ++s) p[static_cast<std::size_t>(s)] = p_digits[static_cast<std::size_t>(s)];
    const auto cls = label_classes(p, pm.mpp);
    // per-state option list: (codeword index, next state)
    std::vector<std::vector<std::pair<int, int>>> opts(static_cast<std::size_t>(m_e));
    bool dead = false;
    for (int s = 0; s < m_e; ++s) {
      const int lbl = p[static_cast<std::size_t>(s)];
      for (int u = 0; u < pm.ksize[static_cast<std::size_t>(lbl)]; ++u)
        for (int t : cls[static_cast<std::size_t>(pm.next[static_cast<std::size_t>(lbl)][static_cast<std::size_t>(u)])])
          opts[static_cast<std::size_t>(s)].emplace_back(u, t);
      if (opts[static_cast<std::size_t>(s)].empty()) dead = true;
    }
    if (dead) continue;
    const int cells = m_e * grid.alpha;
    std::vector<int> radix(static_cast<std::size_t>(cells));
    for (int s = 0; s < m_e; ++s)
      for (int a = 0; a < grid.alpha; ++a)
        radix[static_cast<std::size_t>(s * grid.alpha + a)] =
            static_cast<int>(opts[static_cast<std::size_t>(s)].size());
    std::vector<int> digits(static_cast<std::size_t>(cells), 0);
    std::vector<std::vector<int>> f_tab(static_cast<std::size_t>(m_e),
                                        std::vector<int>(static_cast<std::size_t>(grid.alpha)));
    std::vector<std::vector<int>> g_tab = f_tab;
    do {
      for (int s = 0; s < m_e; ++s)
        for (int a = 0; a < grid.alpha; ++a) {
          const auto& uv =
              opts[static_cast<std::size_t>(s)][static_cast<std::size_t>(digits[static_cast<std::size_t>(s * grid.alpha + a)])];
          f_tab[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = uv.first;
          g_tab[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = uv.second;
        }
      fn(p, f_tab, g_tab);
    } while (advance_odometer(digits, radix));
  } while (advance_odometer(p_digits, p_radix));
}

// Iterates decoder transition structures (parse_of fixed). fn(next_flat) gets
// the resolved transition table, indexed [s][u][y] flattened with strides
// (kmax*beta, beta, 1).
template <typename Fn>
void for_each_decoder_next(const SearchGrid& grid, const ParseMachine& pm, int m_d,
                           const std::vector<int>& parse_of, int kmax, Fn&& fn) {
  const auto cls = label_classes(parse_of, pm.mpp);
  struct Cell {
    int s, u;
    const std::vector<int>* targets;
  };
  std::vector<Cell> cells;
  for (int s = 0; s < m_d; ++s) {
    const int lbl = parse_of[static_cast<std::size_t>(s)];
    for (int u = 0; u < pm.ksize[static_cast<std::size_t>(lbl)]; ++u)
      cells.push_back({s, u,
                       &cls[static_cast<std::size_t>(pm.next[static_cast<std::size_t>(lbl)][static_cast<std::size_t>(u)])]});
  }
  const int per_cell = grid.y_invariant_next ? 1 : grid.beta;
  std::vector<int> radix;
  for (const Cell& c : cells)
    for (int j = 0; j < per_cell; ++j) radix.push_back(static_cast<int>(c.targets->size()));
  std::vector<int> digits(radix.size(), 0);
  std::vector<int> next_flat(static_cast<std::size_t>(m_d) * kmax * grid.beta, 0);
  do {
    std::size_t di = 0;
    for (const Cell& c : cells) {
      for (int y = 0; y < grid.beta; ++y) {
        const int digit = digits[di + static_cast<std::size_t>(grid.y_invariant_next ? 0 : y)];
        next_flat[static_cast<std::size_t>((c.s * kmax + c.u) * grid.beta + y)] =
            (*c.targets)[static_cast<std::size_t>(digit)];
      }
      di += static_cast<std::size_t>(per_cell);
    }
    fn(next_flat);
  } while (advance_odometer(digits, radix));
}

std::vector<std::vector<std::vector<int>>> unflatten(const std::vector<int>& flat,
                                                     const ParseMachine& pm, int m_d,
                                                     const std::vector<int>& parse_of, int kmax,
                                                     int beta) {
  std::vector<std::vector<std::vector<int>>> out(static_cast<std::size_t>(m_d));
  for (int s = 0; s < m_d; ++s) {
    const int k = pm.ksize[static_cast<std::size_t>(parse_of[static_cast<std::size_t>(s)])];
    out[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(k));
    for (int u = 0; u < k; ++u) {
      out[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)].resize(static_cast<std::size_t>(beta));
      for (int y = 0; y < beta; ++y)
        out[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)][static_cast<std::size_t>(y)] =
            flat[static_cast<std::size_t>((s * kmax + u) * beta + y)];
    }
  }
  return out;
}

}  // namespace

std::uint64_t enumerate_pairs(const SearchGrid& grid, const PairVisitor& visit) {
  check_budget(grid);
  const auto family = build_family(grid);
  std::uint64_t emitted = 0;
  for_each_pm(grid, family, [&](const ParseMachine& pm) {
    const int kmax = *std::max_element(pm.ksize.begin(), pm.ksize.end());
    // collect encoders of this parse machine once
    std::vector<FsmEncoder> encoders;
    for (int m_e = 1; m_e <= grid.max_states; ++m_e) {
      for_each_encoder(grid, pm, m_e,
                       [&](const std::vector<int>& p, const std::vector<std::vector<int>>& f_tab,
                           const std::vector<std::vector<int>>& g_tab) {
                         FsmEncoder e = make_encoder(family, pm, m_e, p, f_tab, g_tab);
                         if (!is_canonical(e, m_e, relabel_encoder)) return;
                         encoders.push_back(std::move(e));
                       });
    }
    if (encoders.empty()) return;
    for (int m_d = pm.mpp; m_d <= grid.max_states; ++m_d) {
      for (const auto& parse_of : canonical_surjections(m_d, pm.mpp)) {
        for_each_decoder_next(grid, pm, m_d, parse_of, kmax, [&](const std::vector<int>& next_flat) {
          auto next = unflatten(next_flat, pm, m_d, parse_of, kmax, grid.beta);
          // f' odometer over all used cells
          std::vector<int> radix;
          for (int s = 0; s < m_d; ++s) {
            const int k = pm.ksize[static_cast<std::size_t>(parse_of[static_cast<std::size_t>(s)])];
            for (int j = 0; j < k * grid.beta; ++j) radix.push_back(grid.gamma);
          }
          std::vector<int> digits(radix.size(), 0);
          do {
            std::vector<std::vector<std::vector<int>>> recon(static_cast<std::size_t>(m_d));
            std::size_t di = 0;
            for (int s = 0; s < m_d; ++s) {
              const int k = pm.ksize[static_cast<std::size_t>(parse_of[static_cast<std::size_t>(s)])];
              recon[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(k));
              for (int u = 0; u < k; ++u) {
                auto& yrow = recon[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)];
                yrow.resize(static_cast<std::size_t>(grid.beta));
                for (int y = 0; y < grid.beta; ++y) yrow[static_cast<std::size_t>(y)] = digits[di++];
              }
            }
            for (int delay = 0; delay <= grid.max_delay; ++delay) {
              FsmDecoder dec = make_decoder(family, pm, m_d, parse_of, recon, next, delay);
              if (!is_canonical(dec, m_d, relabel_decoder)) continue;
              for (const FsmEncoder& enc : encoders) {
                visit(enc, dec);
                ++emitted;
              }
            }
          } while (advance_odometer(digits, radix));
        });
      }
    }
  });
  return emitted;
}

// ---- operational optimum ----------------------------------------------------

namespace {

struct BucketState {
  BucketSpec spec;
  double n_rate = 0.0;
  bool have = false;
  double dist = 0.0;
  std::int64_t bits = 0;
  std::string key;
  FsmEncoder enc;
  FsmDecoder dec;
};

}  // namespace

std::vector<OperationalResult> operational_optimum_batch(const Sequence& x,
                                                         std::span<const BucketSpec> buckets,
                                                         const SearchGrid& grid,
                                                         const Channel& ch,
                                                         const DistortionMatrix& rho) {
  require(x.alphabet() <= grid.alpha, ErrorCode::kConfigError,
          "sequence alphabet exceeds grid alpha");
  require(ch.input_size() == grid.alpha && ch.output_size() == grid.beta,
          ErrorCode::kConfigError, "channel shape does not match grid");
  require(rho.source_size() == grid.alpha && rho.recon_size() == grid.gamma,
          ErrorCode::kConfigError, "distortion shape does not match grid");
  check_budget(grid);
  const auto family = build_family(grid);
  const std::int64_t n = x.size();
  require(n >= 1, ErrorCode::kConfigError, "empty sequence");

  std::vector<BucketState> state;
  for (const BucketSpec& b : buckets) {
    require(b.rate >= 0.0, ErrorCode::kConfigError, "bucket rate must be >= 0");
    require(b.max_states >= 1 && b.max_states <= grid.max_states &&
                b.max_delay >= 0 && b.max_delay <= grid.max_delay,
            ErrorCode::kConfigError, "bucket constraints exceed the grid");
    BucketState s;
    s.spec = b;
    s.n_rate = b.rate * static_cast<double>(n);
    state.push_back(std::move(s));
  }

  // workspace
  std::vector<int> u_idx(static_cast<std::size_t>(n));
  std::vector<int> u_len(static_cast<std::size_t>(n));
  std::vector<double> pi_all;
  std::vector<double> pi_next;
  std::vector<double> cost;
  std::vector<int> fstar;

  const auto& xs = x.symbols();

  for_each_pm(grid, family, [&](const ParseMachine& pm) {
    const int kmax = *std::max_element(pm.ksize.begin(), pm.ksize.end());
    // codeword lengths per (parse state, codeword)
    std::vector<std::vector<int>> lens(static_cast<std::size_t>(pm.mpp));
    for (int ss = 0; ss < pm.mpp; ++ss) {
      const PrefixCode& c = family[static_cast<std::size_t>(pm.code_idx[static_cast<std::size_t>(ss)])];
      for (int u = 0; u < c.size(); ++u) lens[static_cast<std::size_t>(ss)].push_back(c.length(u));
    }
    for (int m_e = 1; m_e <= grid.max_states; ++m_e) {
      for_each_encoder(grid, pm, m_e, [&](const std::vector<int>& p,
                                          const std::vector<std::vector<int>>& f_tab,
                                          const std::vector<std::vector<int>>& g_tab) {
        // trajectory on x
        std::int64_t bits = 0;
        int s = 0;
        for (std::int64_t i = 0; i < n; ++i) {
          const int sym = xs[static_cast<std::size_t>(i)];
          const int u = f_tab[static_cast<std::size_t>(s)][static_cast<std::size_t>(sym)];
          u_idx[static_cast<std::size_t>(i)] = u;
          bits += lens[static_cast<std::size_t>(p[static_cast<std::size_t>(s)])][static_cast<std::size_t>(u)];
          s = g_tab[static_cast<std::size_t>(s)][static_cast<std::size_t>(sym)];
        }
        // any bucket reachable with this encoder?
        bool any = false;
        for (const BucketState& b : state)
          if (b.spec.max_states >= m_e && static_cast<double>(bits) <= b.n_rate) any = true;
        if (!any) return;
        FsmEncoder enc_obj;  // materialized lazily
        bool enc_made = false;
        if (m_e >= 3) {
          enc_obj = make_encoder(family, pm, m_e, p, f_tab, g_tab);
          enc_made = true;
          if (!is_canonical(enc_obj, m_e, relabel_encoder)) return;
        }
        for (int m_d = pm.mpp; m_d <= grid.max_states; ++m_d) {
          const int mreq = std::max(m_e, m_d);
          bool any_md = false;
          for (const BucketState& b : state)
            if (b.spec.max_states >= mreq && static_cast<double>(bits) <= b.n_rate) any_md = true;
          if (!any_md) continue;
          for (const auto& parse_of : canonical_surjections(m_d, pm.mpp)) {
            for_each_decoder_next(grid, pm, m_d, parse_of, kmax,
                                  [&](const std::vector<int>& next_flat) {
              // state distribution; row i holds pi at step i (before input i)
              pi_all.assign(static_cast<std::size_t>(n) * m_d, 0.0);
              pi_next.assign(static_cast<std::size_t>(m_d), 0.0);
              pi_all[0] = 1.0;
              for (std::int64_t i = 0; i + 1 < n; ++i) {
                const int ui = u_idx[static_cast<std::size_t>(i)];
                const auto yrow = ch.row(xs[static_cast<std::size_t>(i)]);
                std::fill(pi_next.begin(), pi_next.end(), 0.0);
                for (int sd = 0; sd < m_d; ++sd) {
                  const double ps = pi_all[static_cast<std::size_t>(i) * m_d + sd];
                  if (ps == 0.0) continue;
                  const int base = (sd * kmax + ui) * grid.beta;
                  for (int yv = 0; yv < grid.beta; ++yv) {
                    const double w = ps * yrow[static_cast<std::size_t>(yv)];
                    pi_next[static_cast<std::size_t>(next_flat[static_cast<std::size_t>(base + yv)])] += w;
                  }
                }
                for (int sd = 0; sd < m_d; ++sd)
                  pi_all[static_cast<std::size_t>(i + 1) * m_d + sd] = pi_next[static_cast<std::size_t>(sd)];
              }
              for (int delay = 0; delay <= grid.max_delay; ++delay) {
                bool any_d = false;
                for (const BucketState& b : state)
                  if (b.spec.max_states >= mreq && b.spec.max_delay >= delay &&
                      static_cast<double>(bits) <= b.n_rate)
                    any_d = true;
                if (!any_d) continue;
                // accumulate per-cell reconstruction costs
                cost.assign(static_cast<std::size_t>(m_d) * kmax * grid.beta * grid.gamma, 0.0);
                for (std::int64_t i = delay; i < n; ++i) {
                  const int ui = u_idx[static_cast<std::size_t>(i)];
                  const auto yrow = ch.row(xs[static_cast<std::size_t>(i)]);
                  const auto rrow = rho.row(xs[static_cast<std::size_t>(i - delay)]);
                  for (int sd = 0; sd < m_d; ++sd) {
                    const double ps = pi_all[static_cast<std::size_t>(i) * m_d + sd];
                    if (ps == 0.0) continue;
                    const std::size_t base =
                        (static_cast<std::size_t>(sd) * kmax + static_cast<std::size_t>(ui)) *
                        grid.beta * grid.gamma;
                    for (int yv = 0; yv < grid.beta; ++yv) {
                      const double w = ps * yrow[static_cast<std::size_t>(yv)];
                      if (w == 0.0) continue;
                      const std::size_t cbase = base + static_cast<std::size_t>(yv) * grid.gamma;
                      for (int xh = 0; xh < grid.gamma; ++xh)
                        cost[cbase + static_cast<std::size_t>(xh)] += w * rrow[static_cast<std::size_t>(xh)];
                    }
                  }
                }
                // best reconstruction per cell, ties to the smallest symbol
                fstar.assign(static_cast<std::size_t>(m_d) * kmax * grid.beta, 0);
                for (int sd = 0; sd < m_d; ++sd) {
                  const int k = pm.ksize[static_cast<std::size_t>(parse_of[static_cast<std::size_t>(sd)])];
                  for (int u = 0; u < k; ++u)
                    for (int yv = 0; yv < grid.beta; ++yv) {
                      const std::size_t cbase =
                          ((static_cast<std::size_t>(sd) * kmax + static_cast<std::size_t>(u)) * grid.beta +
                           static_cast<std::size_t>(yv)) *
                          grid.gamma;
                      int best = 0;
                      double bc = cost[cbase];
                      for (int xh = 1; xh < grid.gamma; ++xh)
                        if (cost[cbase + static_cast<std::size_t>(xh)] < bc) {
                          bc = cost[cbase + static_cast<std::size_t>(xh)];
                          best = xh;
                        }
                      fstar[(static_cast<std::size_t>(sd) * kmax + static_cast<std::size_t>(u)) * grid.beta +
                            static_cast<std::size_t>(yv)] = best;
                    }
                }
                // canonical-order value (same arithmetic as the public DP)
                double total = 0.0;
                for (std::int64_t i = 0; i < n; ++i) {
                  const int ui = u_idx[static_cast<std::size_t>(i)];
                  const auto yrow = ch.row(xs[static_cast<std::size_t>(i)]);
                  const std::int64_t target = i - delay;
                  double step = 0.0;
                  for (int sd = 0; sd < m_d; ++sd) {
                    const double ps = pi_all[static_cast<std::size_t>(i) * m_d + sd];
                    if (ps == 0.0) continue;
                    for (int yv = 0; yv < grid.beta; ++yv) {
                      const double w = ps * yrow[static_cast<std::size_t>(yv)];
                      if (target >= 0)
                        step += w * rho.at(xs[static_cast<std::size_t>(target)],
                                           fstar[(static_cast<std::size_t>(sd) * kmax +
                                                  static_cast<std::size_t>(ui)) *
                                                     grid.beta +
                                                 static_cast<std::size_t>(yv)]);
                    }
                  }
                  total += step;
                }
                for (std::int64_t i = n - std::min<std::int64_t>(delay, n); i < n; ++i)
                  total += rho.at(xs[static_cast<std::size_t>(i)], 0);
                const double dist = total / static_cast<double>(n);
                // bucket updates
                for (BucketState& b : state) {
                  if (b.spec.max_states < mreq || b.spec.max_delay < delay ||
                      static_cast<double>(bits) > b.n_rate)
                    continue;
                  const bool better =
                      !b.have || dist < b.dist ||
                      (dist == b.dist && bits < b.bits);
                  bool tie = b.have && dist == b.dist && bits == b.bits;
                  if (!better && !tie) continue;
                  if (!enc_made) {
                    enc_obj = make_encoder(family, pm, m_e, p, f_tab, g_tab);
                    enc_made = true;
                  }
                  auto next = unflatten(next_flat, pm, m_d, parse_of, kmax, grid.beta);
                  std::vector<std::vector<std::vector<int>>> recon(static_cast<std::size_t>(m_d));
                  for (int sd = 0; sd < m_d; ++sd) {
                    const int k = pm.ksize[static_cast<std::size_t>(parse_of[static_cast<std::size_t>(sd)])];
                    recon[static_cast<std::size_t>(sd)].resize(static_cast<std::size_t>(k));
                    for (int u = 0; u < k; ++u) {
                      auto& yrow2 = recon[static_cast<std::size_t>(sd)][static_cast<std::size_t>(u)];
                      yrow2.resize(static_cast<std::size_t>(grid.beta));
                      for (int yv = 0; yv < grid.beta; ++yv)
                        yrow2[static_cast<std::size_t>(yv)] =
                            fstar[(static_cast<std::size_t>(sd) * kmax + static_cast<std::size_t>(u)) *
                                      grid.beta +
                                  static_cast<std::size_t>(yv)];
                    }
                  }
                  FsmDecoder dec = make_decoder(family, pm, m_d, parse_of, recon, next, delay);
                  const std::string key = machine_key(enc_obj) + machine_key(dec);
                  if (tie && !(key < b.key)) continue;
                  b.have = true;
                  b.dist = dist;
                  b.bits = bits;
                  b.key = key;
                  b.enc = enc_obj;
                  b.dec = std::move(dec);
                }
              }
            });
          }
        }
      });
    }
  });

  std::vector<OperationalResult> out;
  for (BucketState& b : state) {
    OperationalResult r;
    r.feasible = b.have;
    if (b.have) {
      r.distortion = b.dist;
      r.bits = b.bits;
      r.rate_used = static_cast<double>(b.bits) / static_cast<double>(n);
      r.encoder = std::move(b.enc);
      r.decoder = std::move(b.dec);
    }
    out.push_back(std::move(r));
  }
  return out;
}

OperationalResult operational_optimum(const Sequence& x, double rate, const SearchGrid& grid,
                                      const Channel& ch, const DistortionMatrix& rho) {
  BucketSpec spec{rate, grid.max_states, grid.max_delay};
  auto res = operational_optimum_batch(x, std::span<const BucketSpec>(&spec, 1), grid, ch, rho);
  return std::move(res.front());
}

}  // namespace wzis
