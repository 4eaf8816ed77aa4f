#include "wzis/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wzis/error.hpp"

namespace wzis {

LambdaGridSpec LambdaGridSpec::parse(const std::string& text) {
  LambdaGridSpec spec;
  if (text.rfind("auto:", 0) == 0) {
    spec.kind = Kind::kAuto;
    spec.count = std::stoi(text.substr(5));
    require(spec.count >= 2, ErrorCode::kConfigError, "auto lambda grid needs >= 2 points");
    return spec;
  }
  if (text.rfind("log:", 0) == 0) {
    spec.kind = Kind::kLog;
    std::istringstream ss(text.substr(4));
    std::string lo, hi, count;
    require(std::getline(ss, lo, ':') && std::getline(ss, hi, ':') && std::getline(ss, count, ':'),
            ErrorCode::kConfigError, "log lambda grid is log:LO:HI:N");
    spec.lo = std::stod(lo);
    spec.hi = std::stod(hi);
    spec.count = std::stoi(count);
    require(spec.lo > 0 && spec.hi > spec.lo && spec.count >= 2, ErrorCode::kConfigError,
            "log lambda grid needs 0 < LO < HI and N >= 2");
    return spec;
  }
  spec.kind = Kind::kList;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    spec.values.push_back(std::stod(item));
  }
  require(!spec.values.empty(), ErrorCode::kEmptyGrid, "lambda list is empty");
  std::sort(spec.values.begin(), spec.values.end());
  return spec;
}

std::string LambdaGridSpec::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kAuto:
      os << "auto:" << count;
      break;
    case Kind::kLog:
      os << "log:" << lo << ':' << hi << ':' << count;
      break;
    case Kind::kList:
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ',';
        os << values[i];
      }
      break;
  }
  return os.str();
}

namespace {

RdCurve solve_curve(const JointBlockDistribution& joint, const CodecConfig& cfg) {
  const int usize = cfg.effective_usize(joint.na);
  switch (cfg.lambdas.kind) {
    case LambdaGridSpec::Kind::kAuto:
      return drf_curve_adaptive(joint, cfg.rho, usize, cfg.solver_seed, cfg.restarts,
                                cfg.lambdas.count);
    case LambdaGridSpec::Kind::kLog: {
      std::vector<double> grid;
      const double step = std::log(cfg.lambdas.hi / cfg.lambdas.lo) /
                          static_cast<double>(cfg.lambdas.count - 1);
      for (int i = 0; i < cfg.lambdas.count; ++i)
        grid.push_back(cfg.lambdas.lo * std::exp(step * i));
      return drf_curve(joint, cfg.rho, grid, usize, cfg.solver_seed, cfg.restarts);
    }
    case LambdaGridSpec::Kind::kList:
      return drf_curve(joint, cfg.rho, cfg.lambdas.values, usize, cfg.solver_seed, cfg.restarts);
  }
  fail(ErrorCode::kInternal, "unreachable lambda grid kind");
}

// Shannon lengths on the active marginal cells; canonical codeword per u.
void build_codebook(const OperatingPoint& point, std::vector<Codeword>& codebook,
                    std::vector<bool>& active) {
  const int usize = point.code.usize;
  std::vector<int> active_ids;
  for (int u = 0; u < usize; ++u)
    if (point.code.marginal[static_cast<std::size_t>(u)] > 0.0) active_ids.push_back(u);
  require(!active_ids.empty(), ErrorCode::kInternal, "code has no active cells");
  std::vector<int> lengths;
  for (int u : active_ids) {
    const double q = point.code.marginal[static_cast<std::size_t>(u)];
    const double raw = -std::log2(q);
    int len = static_cast<int>(std::ceil(raw));
    if (len < 0) len = 0;
    lengths.push_back(active_ids.size() == 1 ? 0 : std::max(len, 1));
  }
  const std::vector<Codeword> words = canonical_prefix_code(lengths);
  codebook.assign(static_cast<std::size_t>(usize), Codeword{0, 0});
  active.assign(static_cast<std::size_t>(usize), false);
  for (std::size_t i = 0; i < active_ids.size(); ++i) {
    codebook[static_cast<std::size_t>(active_ids[i])] = words[i];
    active[static_cast<std::size_t>(active_ids[i])] = true;
  }
}

std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_point(const OperatingPoint& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int v : p.code.assignment) h = hash_mix(h, static_cast<std::uint64_t>(v));
  for (double q : p.code.marginal) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(q));
    std::memcpy(&bits, &q, sizeof(bits));
    h = hash_mix(h, bits);
  }
  for (int v : p.code.reconstruction) h = hash_mix(h, static_cast<std::uint64_t>(v));
  return h;
}

}  // namespace

CodeDesign design_code(const BlockDistribution& type, const CodecConfig& cfg) {
  require(type.alphabet == cfg.channel.input_size(), ErrorCode::kConfigError,
          "type alphabet does not match channel");
  const JointBlockDistribution joint = join_with_channel(type, cfg.channel);
  const RdCurve curve = solve_curve(joint, cfg);

  const auto& pts = curve.points();
  const auto& hull = curve.hull();
  // hull vertices are rate-sorted; pick the largest rate <= R
  int low_idx = hull.front();
  int high_idx = hull.front();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (pts[static_cast<std::size_t>(hull[i])].rate <= cfg.rate + 1e-12) {
      low_idx = hull[i];
      high_idx = (i + 1 < hull.size()) ? hull[i + 1] : hull[i];
    }
  }
  require(pts[static_cast<std::size_t>(low_idx)].rate <= cfg.rate + 1e-12,
          ErrorCode::kInternal, "no hull vertex at or below the target rate");

  CodeDesign design;
  design.low = pts[static_cast<std::size_t>(low_idx)];
  design.high = pts[static_cast<std::size_t>(high_idx)];
  if (cfg.mode == RateMode::kMix && design.high.rate > design.low.rate + 1e-12 &&
      cfg.rate > design.low.rate) {
    const double span = design.high.rate - design.low.rate;
    design.mix_prob_high = std::min(1.0, (cfg.rate - design.low.rate) / span);
  } else {
    design.high = design.low;
    design.mix_prob_high = 0.0;
  }
  build_codebook(design.low, design.codebook_low, design.active_low);
  build_codebook(design.high, design.codebook_high, design.active_high);
  std::uint64_t h = hash_point(design.low);
  h = hash_mix(h, hash_point(design.high));
  for (const Codeword& w : design.codebook_low) {
    h = hash_mix(h, w.bits);
    h = hash_mix(h, static_cast<std::uint64_t>(w.length));
  }
  for (const Codeword& w : design.codebook_high) {
    h = hash_mix(h, w.bits);
    h = hash_mix(h, static_cast<std::uint64_t>(w.length));
  }
  std::uint64_t mp;
  std::memcpy(&mp, &design.mix_prob_high, sizeof(mp));
  design.design_hash = hash_mix(h, mp);
  return design;
}

EncodedStream uc_encode(const Sequence& x, const CodecConfig& cfg, Seed /*seed*/) {
  // The designed test channels are deterministic maps, so the per-block
  // sampling of the scheme is degenerate and the encoder seed is unused;
  // only the time-sharing coin (shared through cfg.solver_seed) is random.
  const BlockDistribution type = block_empirical(x, cfg.block_len);
  const CodeDesign design = design_code(type, cfg);
  EncodedStream out;
  out.bits = encode_type(type, x.size());
  out.header_bits = static_cast<std::int64_t>(out.bits.bit_size());

  Rng mix(derive_seed(cfg.solver_seed, "codec_mix"));
  const std::int64_t blocks = x.size() / cfg.block_len;
  std::vector<int> buf(static_cast<std::size_t>(cfg.block_len));
  for (std::int64_t b = 0; b < blocks; ++b) {
    for (int i = 0; i < cfg.block_len; ++i)
      buf[static_cast<std::size_t>(i)] = x[b * cfg.block_len + i];
    const std::int64_t id = block_id(buf, x.alphabet());
    const bool use_high = design.mix_prob_high > 0.0 && mix.bernoulli(design.mix_prob_high);
    const OperatingPoint& pt = use_high ? design.high : design.low;
    const auto& codebook = use_high ? design.codebook_high : design.codebook_low;
    const int u = pt.code.assignment[static_cast<std::size_t>(id)];
    const Codeword& w = codebook[static_cast<std::size_t>(u)];
    out.bits.push_bits(w.bits, w.length);
  }
  return out;
}

Sequence uc_decode(const EncodedStream& stream, const Sequence& y, const CodecConfig& cfg) {
  require(y.size() % cfg.block_len == 0, ErrorCode::kLengthNotDivisible,
          "side information length is not a multiple of the block length");
  const std::int64_t n = y.size();
  const int alpha = cfg.channel.input_size();
  BitReader reader(stream.bits);
  const BlockDistribution type = decode_type(reader, n, cfg.block_len, alpha);
  const CodeDesign design = design_code(type, cfg);

  const int gamma = cfg.rho.recon_size();
  Rng mix(derive_seed(cfg.solver_seed, "codec_mix"));
  const std::int64_t blocks = n / cfg.block_len;
  std::vector<int> ybuf(static_cast<std::size_t>(cfg.block_len));
  std::vector<int> xbuf(static_cast<std::size_t>(cfg.block_len));
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t b = 0; b < blocks; ++b) {
    const bool use_high = design.mix_prob_high > 0.0 && mix.bernoulli(design.mix_prob_high);
    const OperatingPoint& pt = use_high ? design.high : design.low;
    const auto& codebook = use_high ? design.codebook_high : design.codebook_low;
    const auto& active = use_high ? design.active_high : design.active_low;
    // parse one canonical codeword
    Codeword w{0, 0};
    int u = -1;
    for (;;) {
      u = -1;
      for (int cand = 0; cand < pt.code.usize; ++cand) {
        if (!active[static_cast<std::size_t>(cand)]) continue;
        if (codebook[static_cast<std::size_t>(cand)] == w) {
          u = cand;
          break;
        }
      }
      if (u >= 0) break;
      require(w.length < 62, ErrorCode::kParseFailure, "codeword exceeds 62 bits");
      w.bits = (w.bits << 1) | static_cast<std::uint64_t>(reader.read_bit());
      ++w.length;
    }
    for (int i = 0; i < cfg.block_len; ++i)
      ybuf[static_cast<std::size_t>(i)] = y[b * cfg.block_len + i];
    const std::int64_t yid = block_id(ybuf, cfg.channel.output_size());
    const int xhat_id = pt.code.h(yid, u);
    block_symbols(xhat_id, gamma, cfg.block_len, xbuf);
    out.insert(out.end(), xbuf.begin(), xbuf.end());
  }
  return Sequence(std::move(out), gamma);
}

void write_stream_file(const std::string& path, const EncodedStream& stream) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path + " for writing");
  const auto& bytes = stream.bits.bytes();
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(f.good(), ErrorCode::kIoError, "write failed for " + path);
}

EncodedStream read_stream_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  EncodedStream s;
  const std::size_t nbits = bytes.size() * 8;
  s.bits = Bitstream::from_bytes(std::move(bytes), nbits);
  return s;
}

TypicalityResult typicality_encoder_demo(const Sequence& x, const CodecConfig& cfg, double eps,
                                         Seed seed) {
  require(eps > 0.0, ErrorCode::kConfigError, "eps must be positive");
  const BlockDistribution type = block_empirical(x, cfg.block_len);
  const CodeDesign design = design_code(type, cfg);
  const OperatingPoint& pt = design.low;
  const std::int64_t blocks = x.size() / cfg.block_len;
  const std::int64_t na = type.table_size();

  // I(X^ell; U) = H(U) for a deterministic assignment.
  const double mi = entropy_bits(pt.code.marginal);
  const double budget = static_cast<double>(blocks) * (mi + eps);
  require(budget <= 24.0, ErrorCode::kCapExceeded,
          "typicality demo limited to 24 bits of codebook index space");
  const std::int64_t codebook_size = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::exp2(budget))));
  int index_bits = 0;
  while ((std::int64_t{1} << index_bits) < codebook_size) ++index_bits;

  // x's superletter sequence
  std::vector<int> xu(static_cast<std::size_t>(blocks));
  std::vector<int> buf(static_cast<std::size_t>(cfg.block_len));
  std::vector<std::int64_t> xid(static_cast<std::size_t>(blocks));
  for (std::int64_t b = 0; b < blocks; ++b) {
    for (int i = 0; i < cfg.block_len; ++i)
      buf[static_cast<std::size_t>(i)] = x[b * cfg.block_len + i];
    xid[static_cast<std::size_t>(b)] = block_id(buf, x.alphabet());
  }

  // reference joint P(a) 1{assign(a)=u}; empirical joint for a candidate u^m
  const int usize = pt.code.usize;
  Rng rng(derive_seed(seed, "typicality"));
  std::vector<double> emp(static_cast<std::size_t>(na * usize));
  std::vector<int> cand(static_cast<std::size_t>(blocks));
  TypicalityResult res;
  res.codebook_size = codebook_size;
  res.index_bits = index_bits;
  res.mutual_information = mi;
  for (std::int64_t entry = 0; entry < codebook_size; ++entry) {
    for (std::int64_t b = 0; b < blocks; ++b)
      cand[static_cast<std::size_t>(b)] = rng.sample_pmf(pt.code.marginal);
    std::fill(emp.begin(), emp.end(), 0.0);
    for (std::int64_t b = 0; b < blocks; ++b)
      emp[static_cast<std::size_t>(xid[static_cast<std::size_t>(b)] * usize +
                                   cand[static_cast<std::size_t>(b)])] += 1.0 / static_cast<double>(blocks);
    double tv = 0.0;
    for (std::int64_t a = 0; a < na; ++a)
      for (int u = 0; u < usize; ++u) {
        const double ref = pt.code.assignment[static_cast<std::size_t>(a)] == u
                               ? type.probs[static_cast<std::size_t>(a)]
                               : 0.0;
        tv += std::abs(emp[static_cast<std::size_t>(a * usize + u)] - ref);
      }
    tv *= 0.5;
    if (tv <= eps) {
      res.matched = true;
      res.match_index = entry;
      break;
    }
  }
  if (res.matched) {
    res.stream.bits = encode_type(type, x.size());
    res.stream.header_bits = static_cast<std::int64_t>(res.stream.bits.bit_size());
    res.stream.bits.push_bits(static_cast<std::uint64_t>(res.match_index), index_bits);
  } else {
    res.fell_back = true;
    res.stream = uc_encode(x, cfg, seed);
  }
  return res;
}

}  // namespace wzis
