#include "wzis/growth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "wzis/error.hpp"
#include "wzis/prefix_code.hpp"
#include "wzis/wz_solver.hpp"

namespace wzis {

MaxEntSolution maxent_distribution(std::span<const double> rho0, double delta) {
  require(!rho0.empty(), ErrorCode::kConfigError, "rho0 must be nonempty");
  const int alpha = static_cast<int>(rho0.size());
  double lo_cost = rho0[0];
  for (double c : rho0) {
    require(c >= 0.0 && std::isfinite(c), ErrorCode::kConfigError,
            "rho0 entries must be nonnegative and finite");
    lo_cost = std::min(lo_cost, c);
  }
  require(delta >= lo_cost, ErrorCode::kInfeasibleDelta,
          "delta is below the minimum attainable cost");

  MaxEntSolution sol;
  sol.pmf.assign(static_cast<std::size_t>(alpha), 0.0);

  auto fill = [&](double mu) {
    double z = 0.0;
    for (int i = 0; i < alpha; ++i) {
      sol.pmf[static_cast<std::size_t>(i)] = std::exp2(-mu * rho0[static_cast<std::size_t>(i)]);
      z += sol.pmf[static_cast<std::size_t>(i)];
    }
    double mean = 0.0;
    for (int i = 0; i < alpha; ++i) {
      sol.pmf[static_cast<std::size_t>(i)] /= z;
      mean += sol.pmf[static_cast<std::size_t>(i)] * rho0[static_cast<std::size_t>(i)];
    }
    return mean;
  };

  if (delta == lo_cost) {
    // Point constraint: uniform over the minimizers.
    int count = 0;
    for (double c : rho0)
      if (c == lo_cost) ++count;
    for (int i = 0; i < alpha; ++i)
      sol.pmf[static_cast<std::size_t>(i)] = rho0[static_cast<std::size_t>(i)] == lo_cost
                                                 ? 1.0 / count
                                                 : 0.0;
    sol.mu = 1e3;
    sol.phi = entropy_bits(sol.pmf);
    return sol;
  }
  if (fill(0.0) <= delta) {
    sol.mu = 0.0;  // uniform already meets the moment constraint
    sol.phi = entropy_bits(sol.pmf);
    return sol;
  }
  double lo = 0.0, hi = 1e3;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fill(mid) > delta)
      lo = mid;
    else
      hi = mid;
  }
  sol.mu = hi;
  fill(sol.mu);
  sol.phi = entropy_bits(sol.pmf);
  return sol;
}

namespace {

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// ceil(m * log2(base)); exact when base is a power of two.
std::uint64_t ceil_mul_log2(std::uint64_t m, std::uint64_t base) {
  if (base <= 1 || m == 0) return 0;
  if (is_power_of_two(base)) return m * static_cast<std::uint64_t>(std::countr_zero(base));
  const long double v = static_cast<long double>(m) * log2l(static_cast<long double>(base));
  return static_cast<std::uint64_t>(ceill(v));
}

std::uint64_t ceil_log2_u64(std::uint64_t v) {
  if (v <= 1) return 0;
  std::uint64_t b = 0;
  while ((b < 63) && ((std::uint64_t{1} << b) < v)) ++b;
  if ((std::uint64_t{1} << b) < v) ++b;
  return b;
}

}  // namespace

HeaderBudget header_budget(std::uint64_t states, int alpha, int beta, int gamma) {
  require(states >= 1 && alpha >= 1 && beta >= 1 && gamma >= 1, ErrorCode::kConfigError,
          "header budget parameters must be >= 1");
  HeaderBudget h;
  h.states = states;
  h.alpha = alpha;
  h.beta = beta;
  h.gamma = gamma;
  h.tree_count = 0;
  std::uint64_t fact = 1;  // (k-1)! for k = 1
  for (int k = 1; k <= alpha; ++k) {
    if (k > 1) fact *= static_cast<std::uint64_t>(k - 1);
    h.tree_count += fact;
  }
  const std::uint64_t cells = states * static_cast<std::uint64_t>(alpha) * static_cast<std::uint64_t>(beta);
  h.tree_bits = states * ceil_log2_u64(h.tree_count);
  h.recon_bits = ceil_mul_log2(cells, static_cast<std::uint64_t>(gamma));
  h.next_bits = ceil_mul_log2(cells, states);
  h.total_bits = h.tree_bits + h.recon_bits + h.next_bits;
  return h;
}

std::uint64_t decoder_description_bits(std::uint64_t states, int alpha, int beta, int gamma) {
  return header_budget(states, alpha, beta, gamma).total_bits;
}

std::vector<ThetaSweepRow> theta_sweep(double theta, std::span<const std::uint64_t> n_grid,
                                       int alpha, int beta, int gamma) {
  require(theta > 0.0, ErrorCode::kConfigError, "theta must be positive");
  std::vector<ThetaSweepRow> rows;
  for (std::uint64_t n : n_grid) {
    ThetaSweepRow row;
    row.n = n;
    const long double m = powl(static_cast<long double>(n), static_cast<long double>(theta));
    row.states = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(floorl(m * (1.0L + 1e-12L))));
    row.header_bits = decoder_description_bits(row.states, alpha, beta, gamma);
    row.bits_per_symbol = static_cast<double>(row.header_bits) / static_cast<double>(n);
    rows.push_back(row);
  }
  return rows;
}

// ---- wrapper header -------------------------------------------------------

namespace {

// Little-endian multiprecision accumulator for the mixed-radix fields.
struct BigUint {
  std::vector<std::uint64_t> w;

  void mul_add(std::uint64_t base, std::uint64_t digit) {
    unsigned __int128 carry = digit;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const unsigned __int128 v = static_cast<unsigned __int128>(w[i]) * base + carry;
      w[i] = static_cast<std::uint64_t>(v);
      carry = v >> 64;
    }
    while (carry) {
      w.push_back(static_cast<std::uint64_t>(carry));
      carry >>= 64;
    }
  }

  std::uint64_t div_small(std::uint64_t base) {  // returns remainder
    unsigned __int128 rem = 0;
    for (std::size_t i = w.size(); i-- > 0;) {
      const unsigned __int128 cur = (rem << 64) | w[i];
      w[i] = static_cast<std::uint64_t>(cur / base);
      rem = cur % base;
    }
    while (!w.empty() && w.back() == 0) w.pop_back();
    return static_cast<std::uint64_t>(rem);
  }

  bool zero() const { return w.empty(); }

  int bit(std::uint64_t i) const {
    const std::size_t word = static_cast<std::size_t>(i / 64);
    if (word >= w.size()) return 0;
    return static_cast<int>((w[word] >> (i % 64)) & 1u);
  }
};

void push_biguint(Bitstream& bits, const BigUint& v, std::uint64_t width) {
  for (std::uint64_t i = width; i-- > 0;) bits.push_bit(v.bit(i));
}

BigUint read_biguint(BitReader& reader, std::uint64_t width) {
  BigUint v;
  for (std::uint64_t i = 0; i < width; ++i) v.mul_add(2, static_cast<std::uint64_t>(reader.read_bit()));
  return v;
}

std::vector<std::uint64_t> unpack_digits(BigUint v, std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> digits(count, 0);
  for (std::size_t i = count; i-- > 0;) digits[i] = base <= 1 ? 0 : v.div_small(base);
  require(v.zero(), ErrorCode::kHeaderMismatch, "packed field value out of range");
  return digits;
}

}  // namespace

SearchGrid wrapper_grid(const SearchGrid& grid) {
  SearchGrid g = grid;
  g.complete_codes_only = true;
  g.y_invariant_next = true;
  return g;
}

FsmDecoder extend_to_states(const FsmDecoder& dec, int states) {
  require(states >= dec.state_count, ErrorCode::kConfigError,
          "cannot shrink a decoder");
  if (states == dec.state_count) return dec;
  FsmDecoder d = dec;
  for (int s = dec.state_count; s < states; ++s) {
    d.parse_of.push_back(d.parse_of[0]);
    d.recon.push_back(d.recon[0]);
    d.next.push_back(d.next[0]);
  }
  d.state_count = states;
  return d;
}

namespace {

// Identity-parse normal form used by the wrapper header: every state is its
// own parse state. Valid only for decoders whose transitions ignore y.
FsmDecoder identity_parse_form(const FsmDecoder& dec) {
  FsmDecoder d;
  d.state_count = dec.state_count;
  d.delay = dec.delay;
  d.parse_state_count = dec.state_count;
  d.parse_of.resize(static_cast<std::size_t>(dec.state_count));
  for (int s = 0; s < dec.state_count; ++s) {
    d.parse_of[static_cast<std::size_t>(s)] = s;
    d.codes.push_back(dec.codes[static_cast<std::size_t>(dec.parse_of[static_cast<std::size_t>(s)])]);
  }
  d.recon = dec.recon;
  d.next = dec.next;
  d.parse_next.resize(static_cast<std::size_t>(dec.state_count));
  for (int s = 0; s < dec.state_count; ++s) {
    const int k = d.codes[static_cast<std::size_t>(s)].size();
    for (int u = 0; u < k; ++u) {
      const auto& yrow = dec.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)];
      for (int t : yrow)
        require(t == yrow[0], ErrorCode::kConfigError,
                "identity parse form requires y-independent transitions");
      d.parse_next[static_cast<std::size_t>(s)].push_back(yrow[0]);
    }
  }
  return d;
}

}  // namespace

Bitstream encode_decoder_description(const FsmDecoder& dec, const SearchGrid& grid) {
  const HeaderBudget budget = header_budget(static_cast<std::uint64_t>(grid.max_states),
                                            grid.alpha, grid.beta, grid.gamma);
  const FsmDecoder d = identity_parse_form(extend_to_states(dec, grid.max_states));
  const auto trees = enumerate_complete_trees(grid.alpha);
  const int m = d.state_count;

  Bitstream bits;
  const std::uint64_t per_tree = budget.tree_bits / static_cast<std::uint64_t>(m);
  for (int s = 0; s < m; ++s) {
    int idx = -1;
    for (std::size_t t = 0; t < trees.size(); ++t)
      if (trees[t] == d.codes[static_cast<std::size_t>(s)]) idx = static_cast<int>(t);
    require(idx >= 0, ErrorCode::kInternal, "decoder code is not a complete tree");
    bits.push_bits(static_cast<std::uint64_t>(idx), static_cast<int>(per_tree));
  }
  BigUint fval, gval;
  for (int s = 0; s < m; ++s) {
    const int k = d.codes[static_cast<std::size_t>(s)].size();
    for (int u = 0; u < grid.alpha; ++u)
      for (int y = 0; y < grid.beta; ++y) {
        const bool used = u < k;
        fval.mul_add(static_cast<std::uint64_t>(grid.gamma),
                     used ? static_cast<std::uint64_t>(
                                d.recon[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)][static_cast<std::size_t>(y)])
                          : 0);
        gval.mul_add(static_cast<std::uint64_t>(m),
                     used ? static_cast<std::uint64_t>(
                                d.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)][static_cast<std::size_t>(y)])
                          : 0);
      }
  }
  push_biguint(bits, fval, budget.recon_bits);
  push_biguint(bits, gval, budget.next_bits);
  require(bits.bit_size() == budget.total_bits, ErrorCode::kInternal,
          "decoder description width mismatch");
  return bits;
}

FsmDecoder decode_decoder_description(BitReader& reader, const SearchGrid& grid, int delay) {
  const HeaderBudget budget = header_budget(static_cast<std::uint64_t>(grid.max_states),
                                            grid.alpha, grid.beta, grid.gamma);
  const auto trees = enumerate_complete_trees(grid.alpha);
  const int m = grid.max_states;

  FsmDecoder d;
  d.state_count = m;
  d.delay = delay;
  d.parse_state_count = m;
  const std::uint64_t per_tree = budget.tree_bits / static_cast<std::uint64_t>(m);
  for (int s = 0; s < m; ++s) {
    const std::uint64_t idx = reader.read_bits(static_cast<int>(per_tree));
    require(idx < trees.size(), ErrorCode::kHeaderMismatch, "tree index out of range");
    d.codes.push_back(trees[static_cast<std::size_t>(idx)]);
    d.parse_of.push_back(s);
  }
  const std::size_t cells = static_cast<std::size_t>(m) * grid.alpha * grid.beta;
  const auto fdig = unpack_digits(read_biguint(reader, budget.recon_bits),
                                  static_cast<std::uint64_t>(grid.gamma), cells);
  const auto gdig = unpack_digits(read_biguint(reader, budget.next_bits),
                                  static_cast<std::uint64_t>(m), cells);
  std::size_t di = 0;
  d.recon.resize(static_cast<std::size_t>(m));
  d.next.resize(static_cast<std::size_t>(m));
  d.parse_next.resize(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) {
    const int k = d.codes[static_cast<std::size_t>(s)].size();
    d.recon[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(k),
                                                std::vector<int>(static_cast<std::size_t>(grid.beta)));
    d.next[static_cast<std::size_t>(s)] = d.recon[static_cast<std::size_t>(s)];
    for (int u = 0; u < grid.alpha; ++u)
      for (int y = 0; y < grid.beta; ++y, ++di) {
        if (u < k) {
          require(fdig[di] < static_cast<std::uint64_t>(grid.gamma) &&
                      gdig[di] < static_cast<std::uint64_t>(m),
                  ErrorCode::kHeaderMismatch, "decoder table digit out of range");
          d.recon[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)][static_cast<std::size_t>(y)] =
              static_cast<int>(fdig[di]);
          d.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)][static_cast<std::size_t>(y)] =
              static_cast<int>(gdig[di]);
        } else {
          require(fdig[di] == 0 && gdig[di] == 0, ErrorCode::kHeaderMismatch,
                  "nonzero padding in decoder description");
        }
      }
    for (int u = 0; u < k; ++u) {
      const auto& yrow = d.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)];
      for (int t : yrow)
        require(t == yrow[0], ErrorCode::kHeaderMismatch,
                "decoder description transitions depend on the side letter");
      d.parse_next[static_cast<std::size_t>(s)].push_back(yrow[0]);
    }
  }
  return d;
}

std::optional<WrapperStream> wrapper_encode(const Sequence& x, double rate, double delta,
                                            const SearchGrid& grid, const Channel& ch,
                                            const DistortionMatrix& rho) {
  const SearchGrid wg = wrapper_grid(grid);
  OperationalResult best = operational_optimum(x, rate, wg, ch, rho);
  if (!best.feasible || best.distortion > delta) return std::nullopt;

  WrapperStream out;
  out.witness = best;
  out.witness.decoder = identity_parse_form(extend_to_states(best.decoder, wg.max_states));
  out.bits = encode_decoder_description(best.decoder, wg);
  out.header_bits = static_cast<std::int64_t>(out.bits.bit_size());
  const FsmEncodeResult enc = fsm_encode(x, best.encoder);
  out.payload_bits = enc.total_bits;
  for (const Codeword& w : enc.codewords) out.bits.push_bits(w.bits, w.length);
  return out;
}

ConverseSample converse_process_generate(int m, int blocks, double rate, double delta,
                                         std::span<const double> rho0, Seed seed) {
  require(m >= 1 && blocks >= 1, ErrorCode::kConfigError, "m and blocks must be >= 1");
  require(rate >= 0.0, ErrorCode::kConfigError, "rate must be >= 0");
  const int alpha = static_cast<int>(rho0.size());
  require(alpha >= 1, ErrorCode::kConfigError, "rho0 must be nonempty");
  const double raw = std::exp2(static_cast<double>(m) * rate);
  require(raw <= static_cast<double>(std::int64_t{1} << 20) + 0.5, ErrorCode::kCodebookTooLarge,
          "2^{mR} exceeds the 2^20 codebook cap");
  const std::int64_t count = std::max<std::int64_t>(1, std::llround(raw));

  const MaxEntSolution noise = maxent_distribution(rho0, delta);

  ConverseSample sample;
  Rng cb(derive_seed(seed, "converse_codebook"));
  for (std::int64_t i = 0; i < count; ++i) {
    std::vector<int> word(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
      word[static_cast<std::size_t>(j)] = static_cast<int>(cb.next_below(static_cast<std::uint64_t>(alpha)));
    sample.codebook.emplace_back(std::move(word), alpha);
  }
  Rng pick(derive_seed(seed, "converse_choice"));
  Rng zrng(derive_seed(seed, "converse_noise"));
  std::vector<int> xs;
  xs.reserve(static_cast<std::size_t>(m) * blocks);
  for (int b = 0; b < blocks; ++b) {
    const int idx = static_cast<int>(pick.next_below(static_cast<std::uint64_t>(count)));
    sample.chosen.push_back(idx);
    const Sequence& u = sample.codebook[static_cast<std::size_t>(idx)];
    for (int j = 0; j < m; ++j) {
      const int z = zrng.sample_pmf(noise.pmf);
      xs.push_back((u[j] + z) % alpha);
    }
  }
  sample.x = Sequence(std::move(xs), alpha);
  return sample;
}

}  // namespace wzis
