#include "wzis/fsm.hpp"

#include <sstream>

#include "wzis/error.hpp"

namespace wzis {

void FsmEncoder::check(int alpha) const {
  require(state_count >= 1, ErrorCode::kConfigError, "encoder needs at least one state");
  require(code_label.size() == static_cast<std::size_t>(state_count) &&
              output.size() == static_cast<std::size_t>(state_count) &&
              next_state.size() == static_cast<std::size_t>(state_count),
          ErrorCode::kConfigError, "encoder table sizes do not match state count");
  for (int s = 0; s < state_count; ++s) {
    require(code_label[static_cast<std::size_t>(s)] >= 0 &&
                code_label[static_cast<std::size_t>(s)] < static_cast<int>(codes.size()),
            ErrorCode::kConfigError, "encoder code label out of range");
    const PrefixCode& c = code_of(s);
    require(output[static_cast<std::size_t>(s)].size() == static_cast<std::size_t>(alpha) &&
                next_state[static_cast<std::size_t>(s)].size() == static_cast<std::size_t>(alpha),
            ErrorCode::kConfigError, "encoder rows must cover the source alphabet");
    for (int x = 0; x < alpha; ++x) {
      require(output[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)] >= 0 &&
                  output[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)] < c.size(),
              ErrorCode::kConfigError, "encoder output index outside the state's code");
      const int t = next_state[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)];
      require(t >= 0 && t < state_count, ErrorCode::kConfigError,
              "encoder next state out of range");
    }
  }
}

void FsmDecoder::check(int beta, int gamma) const {
  require(state_count >= 1 && parse_state_count >= 1 && delay >= 0, ErrorCode::kConfigError,
          "decoder needs states and nonnegative delay");
  require(parse_of.size() == static_cast<std::size_t>(state_count) &&
              codes.size() == static_cast<std::size_t>(parse_state_count) &&
              parse_next.size() == static_cast<std::size_t>(parse_state_count) &&
              recon.size() == static_cast<std::size_t>(state_count) &&
              next.size() == static_cast<std::size_t>(state_count),
          ErrorCode::kConfigError, "decoder table sizes do not match state counts");
  for (int ss = 0; ss < parse_state_count; ++ss) {
    require(parse_next[static_cast<std::size_t>(ss)].size() ==
                static_cast<std::size_t>(codes[static_cast<std::size_t>(ss)].size()),
            ErrorCode::kConfigError, "parse transition row does not match code size");
    for (int t : parse_next[static_cast<std::size_t>(ss)])
      require(t >= 0 && t < parse_state_count, ErrorCode::kConfigError,
              "parse next state out of range");
  }
  for (int s = 0; s < state_count; ++s) {
    const int ss = parse_of[static_cast<std::size_t>(s)];
    require(ss >= 0 && ss < parse_state_count, ErrorCode::kConfigError,
            "parse projection out of range");
    const int nu = codes[static_cast<std::size_t>(ss)].size();
    require(recon[static_cast<std::size_t>(s)].size() == static_cast<std::size_t>(nu) &&
                next[static_cast<std::size_t>(s)].size() == static_cast<std::size_t>(nu),
            ErrorCode::kConfigError, "decoder rows must cover the state's code");
    for (int u = 0; u < nu; ++u) {
      require(recon[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)].size() ==
                      static_cast<std::size_t>(beta) &&
                  next[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)].size() ==
                      static_cast<std::size_t>(beta),
              ErrorCode::kConfigError, "decoder rows must cover the side alphabet");
      for (int y = 0; y < beta; ++y) {
        const int xh = recon[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)][static_cast<std::size_t>(y)];
        require(xh >= 0 && xh < gamma, ErrorCode::kConfigError,
                "decoder reconstruction symbol out of range");
        const int t = next[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)][static_cast<std::size_t>(y)];
        require(t >= 0 && t < state_count, ErrorCode::kConfigError,
                "decoder next state out of range");
        // Factorization: the parse component updates by u alone.
        require(parse_of[static_cast<std::size_t>(t)] ==
                    parse_next[static_cast<std::size_t>(ss)][static_cast<std::size_t>(u)],
                ErrorCode::kConfigError,
                "decoder transitions are inconsistent with the parse machine");
      }
    }
  }
}

FsmEncodeResult fsm_encode(const Sequence& x, const FsmEncoder& enc) {
  FsmEncodeResult r;
  r.indices.reserve(static_cast<std::size_t>(x.size()));
  r.codewords.reserve(static_cast<std::size_t>(x.size()));
  int s = 0;
  for (std::int64_t i = 0; i < x.size(); ++i) {
    const int sym = x[i];
    const int u = enc.output[static_cast<std::size_t>(s)][static_cast<std::size_t>(sym)];
    const Codeword& w = enc.code_of(s).at(u);
    r.indices.push_back(u);
    r.codewords.push_back(w);
    r.total_bits += w.length;
    s = enc.next_state[static_cast<std::size_t>(s)][static_cast<std::size_t>(sym)];
  }
  return r;
}

Bitstream concat_codewords(std::span<const Codeword> codewords) {
  Bitstream b;
  for (const Codeword& w : codewords) b.push_bits(w.bits, w.length);
  return b;
}

std::vector<Codeword> parse_bitstream(const Bitstream& bits, const Sequence& y,
                                      const FsmDecoder& dec) {
  BitReader reader(bits);
  std::vector<Codeword> out;
  out.reserve(static_cast<std::size_t>(y.size()));
  int ss = dec.initial_parse_state();
  for (std::int64_t i = 0; i < y.size(); ++i) {
    const PrefixCode& code = dec.code_at_parse(ss);
    require(!code.empty(), ErrorCode::kParseFailure,
            "decoder reached an idle state with input pending");
    Codeword w{0, 0};
    int u = code.find(w);
    while (u < 0) {
      require(w.length < 63, ErrorCode::kParseFailure, "codeword exceeds 63 bits");
      require(reader.remaining() > 0, ErrorCode::kParseFailure,
              "bitstream exhausted mid-codeword");
      w.bits = (w.bits << 1) | static_cast<std::uint64_t>(reader.read_bit());
      ++w.length;
      require(w.length <= code.max_length(), ErrorCode::kParseFailure,
              "bit pattern matches no codeword");
      u = code.find(w);
    }
    out.push_back(w);
    ss = dec.parse_next[static_cast<std::size_t>(ss)][static_cast<std::size_t>(u)];
  }
  require(reader.remaining() == 0, ErrorCode::kParseFailure, "trailing bits after parse");
  return out;
}

Sequence fsm_decode(std::span<const Codeword> u, const Sequence& y, const FsmDecoder& dec) {
  require(static_cast<std::int64_t>(u.size()) == y.size(), ErrorCode::kLengthMismatch,
          "codeword list and side information differ in length");
  const std::int64_t n = y.size();
  const int d = dec.delay;
  int gamma = 0;
  for (const auto& srow : dec.recon)
    for (const auto& urow : srow)
      for (int v : urow) gamma = std::max(gamma, v + 1);
  gamma = std::max(gamma, 1);

  std::vector<int> xh(static_cast<std::size_t>(n), 0);
  int s = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const int ss = dec.parse_of[static_cast<std::size_t>(s)];
    const int ui = dec.code_at_parse(ss).find(u[static_cast<std::size_t>(i)]);
    require(ui >= 0, ErrorCode::kUnknownCodeword,
            "codeword at step " + std::to_string(i) + " is not in the active code");
    const int yi = y[i];
    if (i >= d)
      xh[static_cast<std::size_t>(i - d)] =
          dec.recon[static_cast<std::size_t>(s)][static_cast<std::size_t>(ui)][static_cast<std::size_t>(yi)];
    s = dec.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(ui)][static_cast<std::size_t>(yi)];
  }
  return Sequence(std::move(xh), gamma);
}

namespace detail {

double expected_distortion_dp(std::span<const int> x, std::span<const int> u_index,
                              const FsmDecoder& dec, const Channel& ch,
                              const DistortionMatrix& rho) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  if (n == 0) return 0.0;
  const int d = dec.delay;
  const int m = dec.state_count;
  const int beta = ch.output_size();

  std::vector<double> pi(static_cast<std::size_t>(m), 0.0);
  std::vector<double> pi_next(static_cast<std::size_t>(m), 0.0);
  pi[0] = 1.0;
  double total = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const int ui = u_index[static_cast<std::size_t>(i)];
    const auto yrow = ch.row(x[static_cast<std::size_t>(i)]);
    const int target = static_cast<int>(i) - d;  // reconstruction position
    double step = 0.0;
    std::fill(pi_next.begin(), pi_next.end(), 0.0);
    for (int s = 0; s < m; ++s) {
      const double ps = pi[static_cast<std::size_t>(s)];
      if (ps == 0.0) continue;
      const auto& rrow = dec.recon[static_cast<std::size_t>(s)][static_cast<std::size_t>(ui)];
      const auto& nrow = dec.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(ui)];
      for (int yv = 0; yv < beta; ++yv) {
        const double w = ps * yrow[static_cast<std::size_t>(yv)];
        if (target >= 0)
          step += w * rho.at(x[static_cast<std::size_t>(target)], rrow[static_cast<std::size_t>(yv)]);
        pi_next[static_cast<std::size_t>(nrow[static_cast<std::size_t>(yv)])] += w;
      }
    }
    total += step;
    std::swap(pi, pi_next);
  }
  // Pad positions: the last d reconstructions are the fixed symbol 0.
  for (std::int64_t i = n - std::min<std::int64_t>(d, n); i < n; ++i)
    total += rho.at(x[static_cast<std::size_t>(i)], 0);
  return total / static_cast<double>(n);
}

}  // namespace detail

double expected_distortion_exact(const Sequence& x, const FsmEncoder& enc, const FsmDecoder& dec,
                                 const Channel& ch, const DistortionMatrix& rho) {
  FsmEncodeResult er = fsm_encode(x, enc);
  // Resolve codewords against the decoder's parse trajectory.
  std::vector<int> u_index(er.codewords.size());
  int ss = dec.initial_parse_state();
  for (std::size_t i = 0; i < er.codewords.size(); ++i) {
    const int u = dec.code_at_parse(ss).find(er.codewords[i]);
    require(u >= 0, ErrorCode::kUnknownCodeword,
            "encoder output at step " + std::to_string(i) + " is not parseable");
    u_index[i] = u;
    ss = dec.parse_next[static_cast<std::size_t>(ss)][static_cast<std::size_t>(u)];
  }
  return detail::expected_distortion_dp(x.symbols(), u_index, dec, ch, rho);
}

namespace {

void key_code(std::ostringstream& os, const PrefixCode& c) {
  os << c.size() << ':';
  for (const Codeword& w : c.codewords()) os << w.length << '.' << w.bits << ',';
}

}  // namespace

std::string machine_key(const FsmEncoder& enc) {
  std::ostringstream os;
  os << 'E' << enc.state_count << '|';
  for (int s = 0; s < enc.state_count; ++s) {
    key_code(os, enc.code_of(s));
    os << '/';
    for (int v : enc.output[static_cast<std::size_t>(s)]) os << v << ',';
    os << '/';
    for (int v : enc.next_state[static_cast<std::size_t>(s)]) os << v << ',';
    os << ';';
  }
  return os.str();
}

std::string machine_key(const FsmDecoder& dec) {
  std::ostringstream os;
  os << 'D' << dec.state_count << '|' << dec.delay << '|' << dec.parse_state_count << '|';
  for (int v : dec.parse_of) os << v << ',';
  os << '|';
  for (int ss = 0; ss < dec.parse_state_count; ++ss) {
    key_code(os, dec.codes[static_cast<std::size_t>(ss)]);
    os << '/';
    for (int v : dec.parse_next[static_cast<std::size_t>(ss)]) os << v << ',';
    os << ';';
  }
  os << '|';
  for (const auto& srow : dec.recon) {
    for (const auto& urow : srow)
      for (int v : urow) os << v << ',';
    os << ';';
  }
  os << '|';
  for (const auto& srow : dec.next) {
    for (const auto& urow : srow)
      for (int v : urow) os << v << ',';
    os << ';';
  }
  return os.str();
}

}  // namespace wzis
