#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wzis/bitstream.hpp"
#include "wzis/fsm_search.hpp"
#include "wzis/model.hpp"
#include "wzis/rng.hpp"

namespace wzis {

// Maximum-entropy noise design: P*(z) proportional to 2^(-mu rho0(z)) with
// the multiplier chosen so E rho0 meets the distortion budget.
struct MaxEntSolution {
  std::vector<double> pmf;
  double phi = 0.0;  // entropy of pmf, bits
  double mu = 0.0;
};

// Errors: InfeasibleDelta when delta < min rho0. Bisection on mu in [0,1e3].
MaxEntSolution maxent_distribution(std::span<const double> rho0, double delta);

// Decoder description budget of the enumerate-and-describe scheme:
// K = sum_{k=1..alpha} (k-1)!, total = M ceil(log2 K) + ceil(M a b log2 g)
// + ceil(M a b log2 M). Ceilings are exact (integer comparisons at
// power-of-two boundaries).
struct HeaderBudget {
  std::uint64_t states = 1;  // M
  int alpha = 2, beta = 2, gamma = 2;
  std::uint64_t tree_count = 0;  // K
  std::uint64_t tree_bits = 0;
  std::uint64_t recon_bits = 0;
  std::uint64_t next_bits = 0;
  std::uint64_t total_bits = 0;
};

HeaderBudget header_budget(std::uint64_t states, int alpha, int beta, int gamma);
std::uint64_t decoder_description_bits(std::uint64_t states, int alpha, int beta, int gamma);

struct ThetaSweepRow {
  std::uint64_t n = 0;
  std::uint64_t states = 0;  // floor(n^theta)
  std::uint64_t header_bits = 0;
  double bits_per_symbol = 0.0;
};

std::vector<ThetaSweepRow> theta_sweep(double theta, std::span<const std::uint64_t> n_grid,
                                       int alpha, int beta, int gamma);

struct WrapperStream {
  Bitstream bits;
  std::int64_t header_bits = 0;
  std::int64_t payload_bits = 0;
  OperationalResult witness;
};

// Enumerate-and-describe universal wrapper: finds a pair meeting rate <= nR
// and exact expected distortion <= delta on the grid (restricted to
// complete-tree codes and side-letter-independent decoder transitions so the
// header is invertible), then emits the decoder description followed by the
// encoder's bitstream. Returns nullopt when (R, delta) is not achievable on
// the grid. Errors: BudgetExceeded.
std::optional<WrapperStream> wrapper_encode(const Sequence& x, double rate, double delta,
                                            const SearchGrid& grid, const Channel& ch,
                                            const DistortionMatrix& rho);

// The grid actually searched by wrapper_encode (header-describable family).
SearchGrid wrapper_grid(const SearchGrid& grid);

// Decoder description round-trip. The description always covers exactly
// grid.max_states states; witnesses with fewer states are extended with
// unreachable copies of state 0 before emission.
Bitstream encode_decoder_description(const FsmDecoder& dec, const SearchGrid& grid);
FsmDecoder decode_decoder_description(BitReader& reader, const SearchGrid& grid, int delay);
FsmDecoder extend_to_states(const FsmDecoder& dec, int states);

struct ConverseSample {
  Sequence x;
  std::vector<Sequence> codebook;  // F
  std::vector<int> chosen;         // codebook index per block
};

// Draws the additive process x^m(i) = u^m(i) + z^m(i) (mod alpha) with a
// uniform random codebook of 2^{mR} words and maxent noise at moment delta.
// Errors: CodebookTooLarge when 2^{mR} > 2^20.
ConverseSample converse_process_generate(int m, int blocks, double rate, double delta,
                                         std::span<const double> rho0, Seed seed);

}  // namespace wzis
