#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wzis/bitstream.hpp"
#include "wzis/model.hpp"
#include "wzis/prefix_code.hpp"

namespace wzis {

// Variable-rate finite-state encoder u_i = f(s_i, x_i), s_{i+1} = g(s_i, x_i)
// with initial state 0. Every state carries one prefix code, recorded as an
// index into `codes` via `code_label`; f entries index into that code.
struct FsmEncoder {
  int state_count = 1;
  std::vector<PrefixCode> codes;              // distinct codes used
  std::vector<int> code_label;                // state -> index into codes
  std::vector<std::vector<int>> output;       // f[s][x] -> codeword index
  std::vector<std::vector<int>> next_state;   // g[s][x]

  const PrefixCode& code_of(int s) const {
    return codes[static_cast<std::size_t>(code_label[static_cast<std::size_t>(s)])];
  }
  void check(int alpha) const;
};

// Delayed finite-state decoder. The state has a parse component
// s'' = parse_of[s'] whose update g''(s'', u) depends on the codeword only,
// so the prefix code used to isolate u_i never depends on the random side
// information. Reconstruction: xhat_{i-d} = f'(s'_i, u_i, y_i) for
// i = d+1..n; the final d positions are padding symbol 0.
struct FsmDecoder {
  int state_count = 1;
  int delay = 0;
  int parse_state_count = 1;
  std::vector<int> parse_of;                  // s' -> s''
  std::vector<PrefixCode> codes;              // per parse state
  std::vector<std::vector<int>> parse_next;   // g''[s''][u]
  std::vector<std::vector<std::vector<int>>> recon;  // f'[s'][u][y]
  std::vector<std::vector<std::vector<int>>> next;   // g'[s'][u][y]

  const PrefixCode& code_at_parse(int ss) const {
    return codes[static_cast<std::size_t>(ss)];
  }
  int initial_parse_state() const { return parse_of[0]; }
  void check(int beta, int gamma) const;
};

struct FsmEncodeResult {
  std::vector<int> indices;        // codeword index per step, within the
                                   // encoder state's code
  std::vector<Codeword> codewords;
  std::int64_t total_bits = 0;
};

FsmEncodeResult fsm_encode(const Sequence& x, const FsmEncoder& enc);

Bitstream concat_codewords(std::span<const Codeword> codewords);

// Recovers the codeword list from a concatenated bitstream by walking the
// decoder's parse machine. Errors: ParseFailure.
std::vector<Codeword> parse_bitstream(const Bitstream& bits, const Sequence& y,
                                      const FsmDecoder& dec);

// One realization: maps (u, y) to the reconstruction of length n. Errors:
// UnknownCodeword if some u_i is not in the code at the current parse state.
Sequence fsm_decode(std::span<const Codeword> u, const Sequence& y, const FsmDecoder& dec);

// Exact expected distortion over the side-information channel, by forward
// dynamic programming on the decoder state distribution. Pad positions
// charge rho(x_i, 0).
double expected_distortion_exact(const Sequence& x, const FsmEncoder& enc, const FsmDecoder& dec,
                                 const Channel& ch, const DistortionMatrix& rho);

namespace detail {

// DP core on pre-resolved codeword indices. `u_index[i]` must be valid for
// the code at the parse state reached at step i. Exposed so the search can
// evaluate candidates without re-parsing; expected_distortion_exact goes
// through this same routine.
double expected_distortion_dp(std::span<const int> x, std::span<const int> u_index,
                              const FsmDecoder& dec, const Channel& ch,
                              const DistortionMatrix& rho);

}  // namespace detail

// Canonical byte serializations; used for deterministic tie-breaking.
std::string machine_key(const FsmEncoder& enc);
std::string machine_key(const FsmDecoder& dec);

}  // namespace wzis
