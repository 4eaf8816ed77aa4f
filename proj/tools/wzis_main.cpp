// wzis - Wyner-Ziv coding of individual sequences with finite-state machines
// and block codes. Subcommands wrap the experiment harness; every stochastic
// step is driven by --seed, so reruns with identical flags reproduce output
// files byte for byte.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wzis/config_io.hpp"
#include "wzis/error.hpp"
#include "wzis/experiment.hpp"

namespace {

using nlohmann::json;

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::uint64_t budget = 100'000'000;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--out-dir", c.out_dir, "Directory for output artifacts");
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--budget", c.budget, "Enumeration budget (pairs)");
}

int run(const std::string& kind, const Common& c, json params) {
  if (!c.config_path.empty()) {
    json file = json::parse(wzis::read_text_file(c.config_path));
    for (auto it = file.begin(); it != file.end(); ++it) {
      if (!params.contains(it.key())) params[it.key()] = it.value();
    }
  }
  wzis::ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.master_seed = c.seed;
  cfg.out_dir = c.out_dir;
  cfg.budget = c.budget;
  cfg.params_json = params.dump();
  const wzis::ExperimentSummary summary = wzis::run_experiment(cfg);
  std::cout << summary.summary_json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wyner-Ziv coding of individual sequences: finite-state machine search,\n"
               "block distortion-rate solver, universal codec, and growth accounting"};
  app.require_subcommand(1);

  try {
    // drf
    Common drf_c;
    json drf_p = json::object();
    auto* drf = app.add_subcommand("drf", "Informational distortion-rate curve of an input");
    add_common(drf, drf_c);
    std::string drf_input, drf_channel, drf_lambdas = "auto:32", drf_dms;
    int drf_block = 1, drf_usize = 0, drf_restarts = 16;
    drf->add_option("--input", drf_input, "Sequence document (JSON with `sequence`)");
    drf->add_option("--dms", drf_dms, "Comma-separated source pmf (exact product source)");
    drf->add_option("--channel", drf_channel, "identity:N | bsc:P | config path");
    drf->add_option("--block", drf_block, "Block length ell");
    drf->add_option("--usize", drf_usize, "Auxiliary alphabet size (0 = alpha^ell + 1)");
    drf->add_option("--lambdas", drf_lambdas, "auto:N | log:LO:HI:N | v1,v2,...");
    drf->add_option("--restarts", drf_restarts, "Solver restarts per lambda");
    drf->callback([&]() {
      if (!drf_input.empty()) drf_p["input"] = drf_input;
      if (!drf_dms.empty()) {
        std::vector<double> probs;
        std::istringstream ss(drf_dms);
        std::string item;
        while (std::getline(ss, item, ',')) probs.push_back(std::stod(item));
        drf_p["dms"] = probs;
      }
      if (!drf_channel.empty()) drf_p["channel"] = drf_channel;
      drf_p["block"] = drf_block;
      drf_p["usize"] = drf_usize;
      drf_p["lambdas"] = drf_lambdas;
      drf_p["restarts"] = drf_restarts;
      std::exit(run("drf", drf_c, drf_p));
    });

    // fsm-opt
    Common fsm_c;
    json fsm_p = json::object();
    auto* fsm = app.add_subcommand("fsm-opt", "Exhaustive operational optimum over M-state pairs");
    add_common(fsm, fsm_c);
    std::string fsm_input, fsm_channel;
    int fsm_states = 2, fsm_delay = 1, fsm_lmax = 2;
    double fsm_rate = 0.5;
    fsm->add_option("--input", fsm_input, "Sequence document")->required();
    fsm->add_option("--channel", fsm_channel, "identity:N | bsc:P | config path")->required();
    fsm->add_option("--states", fsm_states, "Max states M");
    fsm->add_option("--delay", fsm_delay, "Max delay d");
    fsm->add_option("--lmax", fsm_lmax, "Max codeword length");
    fsm->add_option("--rate", fsm_rate, "Rate budget R (bits/letter)");
    fsm->callback([&]() {
      fsm_p["input"] = fsm_input;
      fsm_p["channel"] = fsm_channel;
      fsm_p["states"] = fsm_states;
      fsm_p["delay"] = fsm_delay;
      fsm_p["lmax"] = fsm_lmax;
      fsm_p["rate"] = fsm_rate;
      std::exit(run("fsm-opt", fsm_c, fsm_p));
    });

    // codec encode|decode
    auto* codec = app.add_subcommand("codec", "Universal block codec");
    codec->require_subcommand(1);
    Common ce_c;
    auto* cenc = codec->add_subcommand("encode", "Encode a sequence");
    add_common(cenc, ce_c);
    std::string ce_input, ce_channel, ce_out, ce_lambdas = "auto:32", ce_mode = "floor";
    int ce_block = 2, ce_usize = 0, ce_restarts = 8;
    double ce_rate = 0.5;
    std::uint64_t ce_solver_seed = 1;
    cenc->add_option("--input", ce_input, "Sequence document")->required();
    cenc->add_option("--channel", ce_channel, "identity:N | bsc:P | config path");
    cenc->add_option("--out", ce_out, "Stream file to write");
    cenc->add_option("--block", ce_block, "Block length ell");
    cenc->add_option("--rate", ce_rate, "Target rate R");
    cenc->add_option("--usize", ce_usize, "|U| (0 = alpha^ell + 1)");
    cenc->add_option("--restarts", ce_restarts, "Solver restarts");
    cenc->add_option("--solver-seed", ce_solver_seed, "Shared code-design seed");
    cenc->add_option("--lambdas", ce_lambdas, "Lambda grid spec");
    cenc->add_option("--mode", ce_mode, "floor | mix");
    cenc->callback([&]() {
      json p;
      p["input"] = ce_input;
      if (!ce_channel.empty()) p["channel"] = ce_channel;
      if (!ce_out.empty()) p["out"] = ce_out;
      p["block"] = ce_block;
      p["rate"] = ce_rate;
      p["usize"] = ce_usize;
      p["restarts"] = ce_restarts;
      p["solver_seed"] = ce_solver_seed;
      p["lambdas"] = ce_lambdas;
      p["mode"] = ce_mode;
      std::exit(run("codec-encode", ce_c, p));
    });
    Common cd_c;
    auto* cdec = codec->add_subcommand("decode", "Decode a stream with side information");
    add_common(cdec, cd_c);
    std::string cd_stream, cd_side, cd_channel, cd_out, cd_lambdas = "auto:32", cd_mode = "floor";
    int cd_block = 2, cd_usize = 0, cd_restarts = 8;
    double cd_rate = 0.5;
    std::uint64_t cd_solver_seed = 1;
    cdec->add_option("--input", cd_stream, "Stream file")->required();
    cdec->add_option("--sideinfo", cd_side, "Side information document")->required();
    cdec->add_option("--channel", cd_channel, "identity:N | bsc:P | config path");
    cdec->add_option("--out", cd_out, "Reconstruction document to write");
    cdec->add_option("--block", cd_block, "Block length ell");
    cdec->add_option("--rate", cd_rate, "Target rate R");
    cdec->add_option("--usize", cd_usize, "|U| (0 = alpha^ell + 1)");
    cdec->add_option("--restarts", cd_restarts, "Solver restarts");
    cdec->add_option("--solver-seed", cd_solver_seed, "Shared code-design seed");
    cdec->add_option("--lambdas", cd_lambdas, "Lambda grid spec");
    cdec->add_option("--mode", cd_mode, "floor | mix");
    cdec->callback([&]() {
      json p;
      p["stream"] = cd_stream;
      p["sideinfo"] = cd_side;
      if (!cd_channel.empty()) p["channel"] = cd_channel;
      if (!cd_out.empty()) p["out"] = cd_out;
      p["block"] = cd_block;
      p["rate"] = cd_rate;
      p["usize"] = cd_usize;
      p["restarts"] = cd_restarts;
      p["solver_seed"] = cd_solver_seed;
      p["lambdas"] = cd_lambdas;
      p["mode"] = cd_mode;
      std::exit(run("codec-decode", cd_c, p));
    });

    // growth sweep|wrap
    auto* growth = app.add_subcommand("growth", "State-growth accounting");
    growth->require_subcommand(1);
    Common gs_c;
    auto* gsweep = growth->add_subcommand("sweep", "Header cost vs n for M_n = n^theta");
    add_common(gsweep, gs_c);
    double gs_theta = 0.5;
    std::string gs_ns;
    int gs_alpha = 2, gs_beta = 2, gs_gamma = 2;
    gsweep->add_option("--theta", gs_theta, "Growth exponent");
    gsweep->add_option("--ns", gs_ns, "Comma-separated n grid");
    gsweep->add_option("--alpha", gs_alpha, "Source alphabet");
    gsweep->add_option("--beta", gs_beta, "Side alphabet");
    gsweep->add_option("--gamma", gs_gamma, "Reconstruction alphabet");
    gsweep->callback([&]() {
      json p;
      p["theta"] = gs_theta;
      if (!gs_ns.empty()) {
        std::vector<std::uint64_t> ns;
        std::istringstream ss(gs_ns);
        std::string item;
        while (std::getline(ss, item, ',')) ns.push_back(std::stoull(item));
        p["ns"] = ns;
      }
      p["alpha"] = gs_alpha;
      p["beta"] = gs_beta;
      p["gamma"] = gs_gamma;
      std::exit(run("growth-sweep", gs_c, p));
    });
    Common gw_c;
    auto* gwrap = growth->add_subcommand("wrap", "Enumerate-and-describe universal wrapper");
    add_common(gwrap, gw_c);
    std::string gw_input, gw_channel;
    int gw_states = 1, gw_delay = 0, gw_lmax = 2;
    double gw_rate = 0.0, gw_dist = 0.0;
    gwrap->add_option("--input", gw_input, "Sequence document")->required();
    gwrap->add_option("--channel", gw_channel, "identity:N | bsc:P | config path")->required();
    gwrap->add_option("--rate", gw_rate, "Rate budget R");
    gwrap->add_option("--dist", gw_dist, "Distortion budget");
    gwrap->add_option("--states", gw_states, "States M");
    gwrap->add_option("--delay", gw_delay, "Max delay");
    gwrap->add_option("--lmax", gw_lmax, "Max codeword length");
    gwrap->callback([&]() {
      json p;
      p["input"] = gw_input;
      p["channel"] = gw_channel;
      p["rate"] = gw_rate;
      p["dist"] = gw_dist;
      p["states"] = gw_states;
      p["delay"] = gw_delay;
      p["lmax"] = gw_lmax;
      std::exit(run("growth-wrap", gw_c, p));
    });

    // sr region
    auto* sr = app.add_subcommand("sr", "Successive refinement");
    sr->require_subcommand(1);
    Common sr_c;
    auto* srr = sr->add_subcommand("region", "Two-stage distortion region by brute force");
    add_common(srr, sr_c);
    std::string sr_input, sr_channel3, sr_dms;
    int sr_block = 1, sr_ny = 2, sr_nz = 2;
    double sr_rate = 1.0, sr_drate = 1.0;
    srr->add_option("--input", sr_input, "Sequence document");
    srr->add_option("--dms", sr_dms, "Comma-separated source pmf");
    srr->add_option("--channel3", sr_channel3, "Config path with `channel3`, `ny`, `nz`")->required();
    srr->add_option("--block", sr_block, "Block length ell");
    srr->add_option("--rate", sr_rate, "First-stage rate R");
    srr->add_option("--delta-rate", sr_drate, "Second-stage rate dR");
    srr->callback([&]() {
      json p;
      json doc = json::parse(wzis::read_text_file(sr_channel3));
      wzis::require(doc.contains("channel3") && doc.contains("ny") && doc.contains("nz"),
                    wzis::ErrorCode::kConfigError, "channel3 document needs channel3/ny/nz");
      p["channel3"] = doc["channel3"];
      p["ny"] = doc["ny"];
      p["nz"] = doc["nz"];
      if (!sr_input.empty()) p["input"] = sr_input;
      if (!sr_dms.empty()) {
        std::vector<double> probs;
        std::istringstream ss(sr_dms);
        std::string item;
        while (std::getline(ss, item, ',')) probs.push_back(std::stod(item));
        p["dms"] = probs;
      }
      p["block"] = sr_block;
      p["rate"] = sr_rate;
      p["delta_rate"] = sr_drate;
      std::exit(run("sr-region", sr_c, p));
    });

    // gen converse|dms
    auto* gen = app.add_subcommand("gen", "Test-corpus generators");
    gen->require_subcommand(1);
    Common gc_c;
    auto* gconv = gen->add_subcommand("converse", "Codebook-plus-noise process of the converse");
    add_common(gconv, gc_c);
    int gc_m = 8, gc_blocks = 32;
    double gc_rate = 0.5, gc_delta = 0.11;
    std::string gc_rho0;
    gconv->add_option("--m", gc_m, "Block length m");
    gconv->add_option("--blocks", gc_blocks, "Number of blocks");
    gconv->add_option("--rate", gc_rate, "Codebook rate R");
    gconv->add_option("--delta", gc_delta, "Noise moment budget");
    gconv->add_option("--rho0", gc_rho0, "Comma-separated per-symbol cost vector");
    gconv->callback([&]() {
      json p;
      p["m"] = gc_m;
      p["blocks"] = gc_blocks;
      p["rate"] = gc_rate;
      p["delta"] = gc_delta;
      if (!gc_rho0.empty()) {
        std::vector<double> rho0;
        std::istringstream ss(gc_rho0);
        std::string item;
        while (std::getline(ss, item, ',')) rho0.push_back(std::stod(item));
        p["rho0"] = rho0;
      }
      std::exit(run("gen-converse", gc_c, p));
    });
    Common gd_c;
    auto* gdms = gen->add_subcommand("dms", "Sample an i.i.d. sequence");
    add_common(gdms, gd_c);
    std::string gd_probs = "0.5,0.5";
    std::int64_t gd_n = 1024;
    gdms->add_option("--probs", gd_probs, "Comma-separated pmf");
    gdms->add_option("--n", gd_n, "Sequence length");
    gdms->callback([&]() {
      json p;
      std::vector<double> probs;
      std::istringstream ss(gd_probs);
      std::string item;
      while (std::getline(ss, item, ',')) probs.push_back(std::stod(item));
      p["probs"] = probs;
      p["n"] = gd_n;
      std::exit(run("gen-dms", gd_c, p));
    });

    // check theorem1
    auto* check = app.add_subcommand("check", "Cross-module consistency sweeps");
    check->require_subcommand(1);
    Common t1_c;
    auto* t1 = check->add_subcommand("theorem1",
                                     "Operational optimum vs informational curve sweep");
    add_common(t1, t1_c);
    int t1_n = 12, t1_sample = 256, t1_states = 2, t1_delay = 1, t1_lmax = 2;
    t1->add_option("--n", t1_n, "Sequence length");
    t1->add_option("--sample", t1_sample, "Sequences sampled (0 = all 2^n)");
    t1->add_option("--states", t1_states, "Max states M");
    t1->add_option("--delay", t1_delay, "Max delay d");
    t1->add_option("--lmax", t1_lmax, "Max codeword length");
    t1->callback([&]() {
      json p;
      p["n"] = t1_n;
      p["sample"] = t1_sample;
      p["states"] = t1_states;
      p["delay"] = t1_delay;
      p["lmax"] = t1_lmax;
      std::exit(run("theorem1-check", t1_c, p));
    });

    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const wzis::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
