#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wzis/bitstream.hpp"
#include "wzis/empirical.hpp"
#include "wzis/model.hpp"
#include "wzis/prefix_code.hpp"
#include "wzis/rng.hpp"
#include "wzis/wz_solver.hpp"

namespace wzis {

struct LambdaGridSpec {
  enum class Kind { kAuto, kLog, kList };
  Kind kind = Kind::kAuto;
  int count = 32;          // kAuto: refinement budget; kLog: grid size
  double lo = 1e-3;
  double hi = 1e3;
  std::vector<double> values;  // kList

  // "auto:N" | "log:LO:HI:N" | "v1,v2,..."
  static LambdaGridSpec parse(const std::string& text);
  std::string str() const;
};

// How uc_encode treats a target rate that falls between hull vertices.
// kFloor uses the largest-rate vertex at or below R, which keeps the
// deterministic bit-count bound total <= n(R + 1/ell) + header. kMix
// time-shares between the bracketing vertices with a seeded per-block
// Bernoulli that both ends reproduce from the config seed; the bound then
// holds in expectation.
enum class RateMode { kFloor, kMix };

// Everything here is normative: encoder and decoder must agree on all
// fields to re-derive the same code from the transmitted type.
struct CodecConfig {
  int block_len = 2;
  double rate = 0.5;  // bits per source letter
  int usize = 0;      // auxiliary alphabet size; 0 means alpha^ell + 1
  int restarts = 8;
  Seed solver_seed = 1;
  LambdaGridSpec lambdas;
  RateMode mode = RateMode::kFloor;
  Channel channel;
  DistortionMatrix rho;

  int effective_usize(std::int64_t na) const {
    return usize > 0 ? usize : static_cast<int>(na) + 1;
  }
};

struct CodeDesign {
  OperatingPoint low;   // hull vertex with the largest rate <= R
  OperatingPoint high;  // bracketing vertex above (kMix); == low otherwise
  double mix_prob_high = 0.0;
  std::vector<Codeword> codebook_low;   // canonical Shannon-length codewords,
                                        // one per active u (zero-length bits
                                        // for inactive cells)
  std::vector<Codeword> codebook_high;
  std::vector<bool> active_low;
  std::vector<bool> active_high;
  std::uint64_t design_hash = 0;
};

// Deterministic: identical (type, cfg) give bit-identical designs.
CodeDesign design_code(const BlockDistribution& type, const CodecConfig& cfg);

struct EncodedStream {
  Bitstream bits;
  std::int64_t header_bits = 0;
};

EncodedStream uc_encode(const Sequence& x, const CodecConfig& cfg, Seed seed);
Sequence uc_decode(const EncodedStream& stream, const Sequence& y, const CodecConfig& cfg);

// Stream file layout: [type header][codewords], MSB-first, zero-padded to a
// byte boundary. The decoder stops after n/ell blocks, so no length field is
// needed.
void write_stream_file(const std::string& path, const EncodedStream& stream);
EncodedStream read_stream_file(const std::string& path);

struct TypicalityResult {
  EncodedStream stream;
  bool matched = false;
  bool fell_back = false;
  std::int64_t match_index = -1;
  std::int64_t codebook_size = 0;
  int index_bits = 0;
  double mutual_information = 0.0;  // I(X^ell; U) of the designed code
};

// Deterministic-encoder variant at desk scale: draws a random codebook of
// superletter sequences from the designed marginal and transmits the index
// of the first entry jointly typical with x (total variation <= eps). Falls
// back to uc_encode when no entry matches.
TypicalityResult typicality_encoder_demo(const Sequence& x, const CodecConfig& cfg, double eps,
                                         Seed seed);

}  // namespace wzis
