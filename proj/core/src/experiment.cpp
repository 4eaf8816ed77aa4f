#include "wzis/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wzis/codec.hpp"
#include "wzis/config_io.hpp"
#include "wzis/empirical.hpp"
#include "wzis/error.hpp"
#include "wzis/fsm_search.hpp"
#include "wzis/growth.hpp"
#include "wzis/sr.hpp"
#include "wzis/wz_solver.hpp"

namespace wzis {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json parse_params(const ExperimentConfig& cfg) {
  try {
    json j = json::parse(cfg.params_json);
    require(j.is_object(), ErrorCode::kConfigError, "params must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfigError, std::string("params parse error: ") + e.what());
  }
}

std::vector<std::vector<double>> matrix_from_json(const json& j, const char* what) {
  require(j.is_array() && !j.empty(), ErrorCode::kConfigError,
          std::string(what) + " must be a nonempty matrix");
  std::vector<std::vector<double>> m;
  for (const auto& row : j) {
    require(row.is_array(), ErrorCode::kConfigError, std::string(what) + " rows must be arrays");
    m.emplace_back();
    for (const auto& v : row) m.back().push_back(v.get<double>());
  }
  return m;
}

Channel channel_from_param(const json& j) {
  if (j.is_string()) return parse_channel_spec(j.get<std::string>());
  return validate_dmc(matrix_from_json(j, "channel"));
}

DistortionMatrix rho_from_params(const json& params, int alpha) {
  if (params.contains("rho")) return DistortionMatrix(matrix_from_json(params["rho"], "rho"));
  return DistortionMatrix::hamming(alpha);
}

Sequence sequence_from_param(const json& params, const char* field) {
  require(params.contains(field), ErrorCode::kConfigError,
          std::string("missing required param `") + field + "`");
  const auto& j = params[field];
  if (j.is_string()) {
    ModelConfig mc = load_model_config(j.get<std::string>());
    require(mc.sequence.has_value(), ErrorCode::kConfigError,
            "config document has no `sequence` field: " + j.get<std::string>());
    return *mc.sequence;
  }
  require(j.is_array(), ErrorCode::kConfigError, "sequence param must be a path or an array");
  std::vector<int> syms;
  for (const auto& v : j) syms.push_back(v.get<int>());
  int alpha = 0;
  for (int v : syms) alpha = std::max(alpha, v + 1);
  return Sequence(std::move(syms), std::max(alpha, 1));
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

json sequence_to_json(const Sequence& s) {
  json j = json::object();
  j["alphabet_x"] = s.alphabet();
  j["sequence"] = s.symbols();
  return j;
}

json encoder_to_json(const FsmEncoder& e) {
  json j = json::object();
  j["states"] = e.state_count;
  j["code_label"] = e.code_label;
  json codes = json::array();
  for (const auto& c : e.codes) {
    json words = json::array();
    for (const auto& w : c.codewords()) words.push_back(w.str());
    codes.push_back(words);
  }
  j["codes"] = codes;
  j["output"] = e.output;
  j["next"] = e.next_state;
  return j;
}

json decoder_to_json(const FsmDecoder& d) {
  json j = json::object();
  j["states"] = d.state_count;
  j["delay"] = d.delay;
  j["parse_of"] = d.parse_of;
  json codes = json::array();
  for (const auto& c : d.codes) {
    json words = json::array();
    for (const auto& w : c.codewords()) words.push_back(w.str());
    codes.push_back(words);
  }
  j["codes"] = codes;
  j["parse_next"] = d.parse_next;
  j["recon"] = d.recon;
  j["next"] = d.next;
  return j;
}

CodecConfig codec_config_from_params(const json& params) {
  CodecConfig cfg;
  require(params.contains("channel"), ErrorCode::kConfigError, "missing `channel`");
  cfg.channel = channel_from_param(params["channel"]);
  cfg.block_len = params.value("block", 2);
  cfg.rate = params.value("rate", 0.5);
  cfg.usize = params.value("usize", 0);
  cfg.restarts = params.value("restarts", 8);
  cfg.solver_seed = params.value("solver_seed", std::uint64_t{1});
  cfg.lambdas = LambdaGridSpec::parse(params.value("lambdas", std::string("auto:32")));
  const std::string mode = params.value("mode", std::string("floor"));
  require(mode == "floor" || mode == "mix", ErrorCode::kConfigError,
          "mode must be `floor` or `mix`");
  cfg.mode = mode == "floor" ? RateMode::kFloor : RateMode::kMix;
  cfg.rho = rho_from_params(params, cfg.channel.input_size());
  require(cfg.block_len >= 1 && cfg.rate >= 0.0, ErrorCode::kConfigError,
          "block must be >= 1 and rate >= 0");
  return cfg;
}

// ---- individual experiments -------------------------------------------------

json run_drf(const ExperimentConfig& cfg, const json& params,
             std::vector<std::string>& artifacts) {
  require(params.contains("channel"), ErrorCode::kConfigError, "missing `channel`");
  const Channel ch = channel_from_param(params["channel"]);
  const int ell = params.value("block", 1);
  BlockDistribution type;
  if (params.contains("dms")) {
    std::vector<double> probs;
    for (const auto& v : params["dms"]) probs.push_back(v.get<double>());
    type = product_block_distribution(probs, ell);
  } else {
    type = block_empirical(sequence_from_param(params, "input"), ell);
  }
  const DistortionMatrix rho = rho_from_params(params, type.alphabet);
  const JointBlockDistribution joint = join_with_channel(type, ch);
  const int usize = params.value("usize", 0) > 0 ? params["usize"].get<int>()
                                                 : static_cast<int>(joint.na) + 1;
  const int restarts = params.value("restarts", 16);
  const Seed seed = derive_seed(cfg.master_seed, "drf_solver");
  const LambdaGridSpec spec = LambdaGridSpec::parse(params.value("lambdas", std::string("auto:32")));

  RdCurve curve;
  if (spec.kind == LambdaGridSpec::Kind::kAuto) {
    curve = drf_curve_adaptive(joint, rho, usize, seed, restarts, spec.count);
  } else if (spec.kind == LambdaGridSpec::Kind::kLog) {
    std::vector<double> grid;
    const double step = std::log(spec.hi / spec.lo) / (spec.count - 1);
    for (int i = 0; i < spec.count; ++i) grid.push_back(spec.lo * std::exp(step * i));
    curve = drf_curve(joint, rho, grid, usize, seed, restarts);
  } else {
    curve = drf_curve(joint, rho, spec.values, usize, seed, restarts);
  }

  std::ostringstream csv;
  csv << "lambda,rate,distortion,on_hull\n";
  for (std::size_t i = 0; i < curve.points().size(); ++i) {
    const auto& p = curve.points()[i];
    csv << fmt(p.lambda) << ',' << fmt(p.rate) << ',' << fmt(p.distortion) << ','
        << (curve.on_hull(static_cast<int>(i)) ? 1 : 0) << '\n';
  }
  write_text_file(out_path(cfg, "drf_curve.csv"), csv.str());
  artifacts.push_back("drf_curve.csv");

  json summary;
  summary["points"] = curve.points().size();
  summary["hull_vertices"] = curve.hull().size();
  summary["rate0_distortion"] = curve.query(0.0);
  return summary;
}

json run_fsm_opt(const ExperimentConfig& cfg, const json& params,
                 std::vector<std::string>& artifacts) {
  const Sequence x = sequence_from_param(params, "input");
  require(params.contains("channel"), ErrorCode::kConfigError, "missing `channel`");
  const Channel ch = channel_from_param(params["channel"]);
  SearchGrid grid;
  grid.max_states = params.value("states", 2);
  grid.max_delay = params.value("delay", 1);
  grid.max_len = params.value("lmax", 2);
  grid.alpha = ch.input_size();
  grid.beta = ch.output_size();
  const DistortionMatrix rho = rho_from_params(params, grid.alpha);
  grid.gamma = rho.recon_size();
  grid.budget = cfg.budget;
  const double rate = params.value("rate", 0.5);

  const OperationalResult res = operational_optimum(x, rate, grid, ch, rho);
  json j;
  j["feasible"] = res.feasible;
  j["distortion"] = res.distortion;
  j["bits"] = res.bits;
  j["rate_used"] = res.rate_used;
  j["rate_limit"] = rate;
  j["pair_count"] = pair_count(grid);
  if (res.feasible) {
    j["encoder"] = encoder_to_json(res.encoder);
    j["decoder"] = decoder_to_json(res.decoder);
  }
  write_text_file(out_path(cfg, "fsm_opt.json"), j.dump(2) + "\n");
  artifacts.push_back("fsm_opt.json");
  return json{{"feasible", res.feasible}, {"distortion", res.distortion}};
}

json run_codec_encode(const ExperimentConfig& cfg, const json& params,
                      std::vector<std::string>& artifacts) {
  const Sequence x = sequence_from_param(params, "input");
  const CodecConfig cc = codec_config_from_params(params);
  const Seed seed = derive_seed(cfg.master_seed, "codec_encode");
  const EncodedStream stream = uc_encode(x, cc, seed);
  const std::string stream_path = params.contains("out") ? params["out"].get<std::string>()
                                                         : out_path(cfg, "codec_stream.bin");
  write_stream_file(stream_path, stream);
  artifacts.push_back(stream_path);

  json j;
  j["n"] = x.size();
  j["total_bits"] = stream.bits.bit_size();
  j["header_bits"] = stream.header_bits;
  j["rate"] = static_cast<double>(stream.bits.bit_size()) / static_cast<double>(x.size());
  const BlockDistribution type = block_empirical(x, cc.block_len);
  const CodeDesign design = design_code(type, cc);
  j["design_hash"] = design.design_hash;
  j["design_rate"] = design.low.rate;
  j["design_distortion"] = design.low.distortion;
  write_text_file(out_path(cfg, "codec_encode.json"), j.dump(2) + "\n");
  artifacts.push_back("codec_encode.json");
  return j;
}

json run_codec_decode(const ExperimentConfig& cfg, const json& params,
                      std::vector<std::string>& artifacts) {
  require(params.contains("stream"), ErrorCode::kConfigError, "missing `stream`");
  const EncodedStream stream = read_stream_file(params["stream"].get<std::string>());
  const Sequence y = sequence_from_param(params, "sideinfo");
  const CodecConfig cc = codec_config_from_params(params);
  const Sequence xhat = uc_decode(stream, y, cc);
  const std::string out = params.contains("out") ? params["out"].get<std::string>()
                                                 : out_path(cfg, "decoded.json");
  write_text_file(out, sequence_to_json(xhat).dump(2) + "\n");
  artifacts.push_back(out);

  const BlockDistribution type =
      decode_type(stream.bits, y.size(), cc.block_len, cc.channel.input_size());
  const CodeDesign design = design_code(type, cc);
  json j;
  j["n"] = xhat.size();
  j["design_hash"] = design.design_hash;
  write_text_file(out_path(cfg, "codec_decode.json"), j.dump(2) + "\n");
  artifacts.push_back("codec_decode.json");
  return j;
}

json run_growth_sweep(const ExperimentConfig& cfg, const json& params,
                      std::vector<std::string>& artifacts) {
  const double theta = params.value("theta", 0.5);
  std::vector<std::uint64_t> ns;
  if (params.contains("ns")) {
    for (const auto& v : params["ns"]) ns.push_back(v.get<std::uint64_t>());
  } else {
    for (std::uint64_t n = 1000; n <= 10'000'000; n *= 10) ns.push_back(n);
  }
  const int alpha = params.value("alpha", 2);
  const int beta = params.value("beta", 2);
  const int gamma = params.value("gamma", 2);
  const auto rows = theta_sweep(theta, ns, alpha, beta, gamma);

  std::ostringstream csv;
  csv << "n,states,header_bits,header_bits_per_symbol\n";
  for (const auto& r : rows)
    csv << r.n << ',' << r.states << ',' << r.header_bits << ',' << fmt(r.bits_per_symbol)
        << '\n';
  write_text_file(out_path(cfg, "theta_sweep.csv"), csv.str());
  artifacts.push_back("theta_sweep.csv");
  return json{{"rows", rows.size()}, {"theta", theta}};
}

json run_growth_wrap(const ExperimentConfig& cfg, const json& params,
                     std::vector<std::string>& artifacts) {
  const Sequence x = sequence_from_param(params, "input");
  require(params.contains("channel"), ErrorCode::kConfigError, "missing `channel`");
  const Channel ch = channel_from_param(params["channel"]);
  SearchGrid grid;
  grid.max_states = params.value("states", 1);
  grid.max_delay = params.value("delay", 0);
  grid.max_len = params.value("lmax", 2);
  grid.alpha = ch.input_size();
  grid.beta = ch.output_size();
  const DistortionMatrix rho = rho_from_params(params, grid.alpha);
  grid.gamma = rho.recon_size();
  grid.budget = cfg.budget;
  const double rate = params.value("rate", 0.0);
  const double dist = params.value("dist", 0.0);

  const auto stream = wrapper_encode(x, rate, dist, grid, ch, rho);
  json j;
  j["achievable"] = stream.has_value();
  j["header_budget_bits"] =
      decoder_description_bits(static_cast<std::uint64_t>(grid.max_states), grid.alpha,
                               grid.beta, grid.gamma);
  if (stream) {
    j["header_bits"] = stream->header_bits;
    j["payload_bits"] = stream->payload_bits;
    j["total_bits"] = stream->bits.bit_size();
    j["witness_distortion"] = stream->witness.distortion;
    EncodedStream file;
    file.bits = stream->bits;
    write_stream_file(out_path(cfg, "wrap_stream.bin"), file);
    artifacts.push_back("wrap_stream.bin");
  }
  write_text_file(out_path(cfg, "wrap.json"), j.dump(2) + "\n");
  artifacts.push_back("wrap.json");
  return j;
}

json run_sr_region(const ExperimentConfig& cfg, const json& params,
                   std::vector<std::string>& artifacts) {
  require(params.contains("channel3"), ErrorCode::kConfigError,
          "missing `channel3` (P(y,z|x) rows with z fastest)");
  require(params.contains("ny") && params.contains("nz"), ErrorCode::kConfigError,
          "missing `ny`/`nz`");
  const TwoSidedChannel ch3 = validate_two_sided(
      matrix_from_json(params["channel3"], "channel3"), params["ny"].get<int>(),
      params["nz"].get<int>());
  const int ell = params.value("block", 1);
  BlockDistribution type;
  if (params.contains("dms")) {
    std::vector<double> probs;
    for (const auto& v : params["dms"]) probs.push_back(v.get<double>());
    type = product_block_distribution(probs, ell);
  } else {
    type = block_empirical(sequence_from_param(params, "input"), ell);
  }
  const DistortionMatrix rho1 =
      params.contains("rho1") ? DistortionMatrix(matrix_from_json(params["rho1"], "rho1"))
                              : DistortionMatrix::hamming(type.alphabet);
  const DistortionMatrix rho2 =
      params.contains("rho2") ? DistortionMatrix(matrix_from_json(params["rho2"], "rho2"))
                              : DistortionMatrix::hamming(type.alphabet);
  const double rate = params.value("rate", 1.0);
  const double delta_rate = params.value("delta_rate", 1.0);

  const auto frontier = brute_force_sr_region(type, ch3, rho1, rho2, rate, delta_rate);
  std::ostringstream csv;
  csv << "D1,D2,HU,HVgU\n";
  for (const auto& p : frontier)
    csv << fmt(p.d1) << ',' << fmt(p.d2) << ',' << fmt(p.hu) << ',' << fmt(p.hv_given_u) << '\n';
  write_text_file(out_path(cfg, "sr_region.csv"), csv.str());
  artifacts.push_back("sr_region.csv");
  return json{{"frontier_points", frontier.size()}};
}

json run_gen_converse(const ExperimentConfig& cfg, const json& params,
                      std::vector<std::string>& artifacts) {
  const int m = params.value("m", 8);
  const int blocks = params.value("blocks", 32);
  const double rate = params.value("rate", 0.5);
  const double delta = params.value("delta", 0.11);
  std::vector<double> rho0;
  if (params.contains("rho0")) {
    for (const auto& v : params["rho0"]) rho0.push_back(v.get<double>());
  } else {
    rho0 = {0.0, 1.0};
  }
  const Seed seed = derive_seed(cfg.master_seed, "converse");
  const ConverseSample sample = converse_process_generate(m, blocks, rate, delta, rho0, seed);

  json j = sequence_to_json(sample.x);
  json book = json::array();
  for (const auto& w : sample.codebook) book.push_back(w.symbols());
  j["codebook"] = book;
  j["chosen"] = sample.chosen;
  write_text_file(out_path(cfg, "converse.json"), j.dump(2) + "\n");
  artifacts.push_back("converse.json");
  return json{{"n", sample.x.size()}, {"codebook_size", sample.codebook.size()}};
}

json run_gen_dms(const ExperimentConfig& cfg, const json& params,
                 std::vector<std::string>& artifacts) {
  std::vector<double> probs;
  require(params.contains("probs"), ErrorCode::kConfigError, "missing `probs`");
  for (const auto& v : params["probs"]) probs.push_back(v.get<double>());
  const std::int64_t n = params.value("n", std::int64_t{1024});
  double sum = 0.0;
  for (double p : probs) sum += p;
  require(std::abs(sum - 1.0) <= kStochasticTol, ErrorCode::kNonStochasticRow,
          "probs must sum to 1");
  Rng rng(derive_seed(cfg.master_seed, "dms"));
  std::vector<int> syms;
  for (std::int64_t i = 0; i < n; ++i) syms.push_back(rng.sample_pmf(probs));
  const Sequence x(std::move(syms), static_cast<int>(probs.size()));
  write_text_file(out_path(cfg, "dms.json"), sequence_to_json(x).dump(2) + "\n");
  artifacts.push_back("dms.json");
  return json{{"n", n}};
}

json run_theorem1(const ExperimentConfig& cfg, const json& params,
                  std::vector<std::string>& artifacts) {
  Theorem1Options opt;
  opt.n = params.value("n", 12);
  opt.sample = params.value("sample", 256);
  if (params.contains("channels")) {
    opt.channels.clear();
    for (const auto& v : params["channels"]) opt.channels.push_back(v.get<std::string>());
  }
  if (params.contains("rates")) {
    opt.rates.clear();
    for (const auto& v : params["rates"]) opt.rates.push_back(v.get<double>());
  }
  if (params.contains("blocks")) {
    opt.blocks.clear();
    for (const auto& v : params["blocks"]) opt.blocks.push_back(v.get<int>());
  }
  opt.max_states = params.value("states", 2);
  opt.max_delay = params.value("delay", 1);
  opt.max_len = params.value("lmax", 2);
  opt.budget = cfg.budget > 0 ? std::max(cfg.budget, std::uint64_t{100'000'000'000}) : opt.budget;
  opt.seed = derive_seed(cfg.master_seed, "theorem1");

  const Theorem1Report report = run_theorem1_check(opt);
  write_text_file(out_path(cfg, "theorem1.csv"), report.csv);
  artifacts.push_back("theorem1.csv");
  json j;
  j["sequences"] = report.sequences;
  j["checks"] = report.checks;
  j["violations"] = report.violations;
  j["min_margin"] = report.min_margin;
  j["zero_rate_checks"] = report.zero_rate_checks;
  j["zero_rate_mismatches"] = report.zero_rate_mismatches;
  j["max_zero_rate_gap"] = report.max_zero_rate_gap;
  return j;
}

}  // namespace

Channel parse_channel_spec(const std::string& spec) {
  if (spec.rfind("identity:", 0) == 0) return identity_channel(std::stoi(spec.substr(9)));
  if (spec.rfind("bsc:", 0) == 0) return binary_symmetric_channel(std::stod(spec.substr(4)));
  ModelConfig mc = load_model_config(spec);
  require(mc.channel.has_value(), ErrorCode::kConfigError,
          "config document has no `channel` field: " + spec);
  return *mc.channel;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  const json params = parse_params(cfg);
  ExperimentSummary out;
  json summary;
  summary["kind"] = cfg.kind;
  summary["seed"] = cfg.master_seed;

  json result;
  if (cfg.kind == "drf") {
    result = run_drf(cfg, params, out.artifacts);
  } else if (cfg.kind == "fsm-opt") {
    result = run_fsm_opt(cfg, params, out.artifacts);
  } else if (cfg.kind == "codec-encode") {
    result = run_codec_encode(cfg, params, out.artifacts);
  } else if (cfg.kind == "codec-decode") {
    result = run_codec_decode(cfg, params, out.artifacts);
  } else if (cfg.kind == "growth-sweep") {
    result = run_growth_sweep(cfg, params, out.artifacts);
  } else if (cfg.kind == "growth-wrap") {
    result = run_growth_wrap(cfg, params, out.artifacts);
  } else if (cfg.kind == "sr-region") {
    result = run_sr_region(cfg, params, out.artifacts);
  } else if (cfg.kind == "gen-converse") {
    result = run_gen_converse(cfg, params, out.artifacts);
  } else if (cfg.kind == "gen-dms") {
    result = run_gen_dms(cfg, params, out.artifacts);
  } else if (cfg.kind == "theorem1-check") {
    result = run_theorem1(cfg, params, out.artifacts);
  } else {
    fail(ErrorCode::kConfigError, "unknown experiment kind `" + cfg.kind + "`");
  }
  summary["result"] = result;
  out.summary_json = summary.dump(2) + "\n";
  write_text_file(out_path(cfg, "summary.json"), out.summary_json);
  out.artifacts.push_back("summary.json");
  return out;
}

// ---- Theorem-1 sweep --------------------------------------------------------

Theorem1Report run_theorem1_check(const Theorem1Options& opt) {
  require(opt.n >= 2 && opt.n <= 24, ErrorCode::kConfigError, "n must be in [2, 24]");
  Theorem1Report report;
  report.min_margin = std::numeric_limits<double>::infinity();

  const DistortionMatrix rho = DistortionMatrix::hamming(2);
  SearchGrid grid;
  grid.max_states = opt.max_states;
  grid.max_delay = opt.max_delay;
  grid.max_len = opt.max_len;
  grid.alpha = 2;
  grid.beta = 2;
  grid.gamma = 2;
  grid.budget = opt.budget;

  // bucket layout: [rate][states][delay]
  std::vector<BucketSpec> buckets;
  for (double r : opt.rates)
    for (int m = 1; m <= opt.max_states; ++m)
      for (int d = 0; d <= opt.max_delay; ++d) buckets.push_back({r, m, d});
  auto bucket_at = [&](std::size_t ri, int m, int d) {
    return (ri * opt.max_states + static_cast<std::size_t>(m - 1)) *
               (static_cast<std::size_t>(opt.max_delay) + 1) +
           static_cast<std::size_t>(d);
  };

  // sequence sample
  std::vector<std::uint64_t> xs_ids;
  const std::uint64_t total = std::uint64_t{1} << opt.n;
  if (opt.sample <= 0 || static_cast<std::uint64_t>(opt.sample) >= total) {
    for (std::uint64_t v = 0; v < total; ++v) xs_ids.push_back(v);
  } else {
    std::vector<std::uint64_t> all(total);
    for (std::uint64_t v = 0; v < total; ++v) all[v] = v;
    Rng rng(derive_seed(opt.seed, "t1_sample"));
    for (std::size_t i = 0; i < static_cast<std::size_t>(opt.sample); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.next_below(total - i));
      std::swap(all[i], all[j]);
      xs_ids.push_back(all[i]);
    }
  }
  report.sequences = static_cast<std::int64_t>(xs_ids.size());

  // per-channel, per-level curve caches keyed by (ell, type counts)
  struct Agg {
    double min_margin = std::numeric_limits<double>::infinity();
    std::int64_t violations = 0;
    std::int64_t checks = 0;
    int max_level = 0;
  };
  std::map<std::string, Agg> agg;  // "channel,ell,M,d,R" -> aggregate

  for (const std::string& chspec : opt.channels) {
    const Channel ch = parse_channel_spec(chspec);
    std::vector<std::map<std::string, RdCurve>> cache(opt.restart_ladder.size());
    auto curve_for = [&](int level, const BlockDistribution& type) -> const RdCurve& {
      std::ostringstream key;
      key << type.block_len << ':';
      for (std::int64_t c : *type.counts) key << c << ',';
      auto& slot = cache[static_cast<std::size_t>(level)];
      auto it = slot.find(key.str());
      if (it != slot.end()) return it->second;
      const JointBlockDistribution joint = join_with_channel(type, ch);
      const int usize = static_cast<int>(joint.na) + 1;
      RdCurve curve = drf_curve_adaptive(
          joint, rho, usize, derive_seed(opt.seed, "t1_solver", static_cast<std::uint64_t>(level)),
          opt.restart_ladder[static_cast<std::size_t>(level)],
          opt.lambda_budget * (level + 1));
      return slot.emplace(key.str(), std::move(curve)).first->second;
    };

    for (std::uint64_t id : xs_ids) {
      std::vector<int> syms(static_cast<std::size_t>(opt.n));
      for (int i = 0; i < opt.n; ++i)
        syms[static_cast<std::size_t>(i)] = static_cast<int>((id >> (opt.n - 1 - i)) & 1u);
      const Sequence x(std::move(syms), 2);
      const auto results = operational_optimum_batch(x, buckets, grid, ch, rho);

      for (int ell : opt.blocks) {
        if (opt.n % ell != 0) continue;
        const BlockDistribution type = block_empirical(x, ell);
        for (std::size_t ri = 0; ri < opt.rates.size(); ++ri) {
          for (int m = 1; m <= opt.max_states; ++m) {
            for (int d = 0; d <= opt.max_delay; ++d) {
              const auto& lhs = results[bucket_at(ri, m, d)];
              const double shift = 2.0 * std::log2(static_cast<double>(m)) / ell;
              double margin = 0.0;
              int level = 0;
              for (;;) {
                const RdCurve& curve = curve_for(level, type);
                const double rhs = curve.query(opt.rates[ri] + shift) -
                                   rho.max() * static_cast<double>(d) / ell;
                margin = lhs.distortion - rhs;
                if (margin >= -opt.tolerance ||
                    level + 1 >= static_cast<int>(opt.restart_ladder.size()))
                  break;
                ++level;
              }
              ++report.checks;
              report.min_margin = std::min(report.min_margin, margin);
              std::ostringstream k;
              k << chspec << ',' << ell << ',' << m << ',' << d << ',' << fmt(opt.rates[ri]);
              Agg& a = agg[k.str()];
              a.checks++;
              a.min_margin = std::min(a.min_margin, margin);
              a.max_level = std::max(a.max_level, level);
              if (margin < -opt.tolerance) {
                ++a.violations;
                ++report.violations;
              }
            }
          }
        }
      }

      // zero-rate consistency at ell = 1 (denoising special case)
      std::size_t r0 = opt.rates.size();
      for (std::size_t ri = 0; ri < opt.rates.size(); ++ri)
        if (opt.rates[ri] == 0.0) r0 = ri;
      if (r0 < opt.rates.size()) {
        const BlockDistribution type1 = block_empirical(x, 1);
        const RdCurve& curve1 = curve_for(0, type1);
        const double lhs = results[bucket_at(r0, 1, 0)].distortion;
        const double gap = std::abs(curve1.query(0.0) - lhs);
        ++report.zero_rate_checks;
        report.max_zero_rate_gap = std::max(report.max_zero_rate_gap, gap);
        if (gap > opt.tolerance) ++report.zero_rate_mismatches;
      }
    }
  }

  std::ostringstream csv;
  csv << "channel,ell,states,delay,rate,checks,violations,min_margin,max_solver_level\n";
  for (const auto& [k, a] : agg)
    csv << k << ',' << a.checks << ',' << a.violations << ',' << fmt(a.min_margin) << ','
        << a.max_level << '\n';
  report.csv = csv.str();
  return report;
}

}  // namespace wzis
