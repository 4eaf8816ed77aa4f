// Acceptance suite: one pass/fail line per criterion. Exit status is the
// number of failed criteria. Set WZIS_ACCEPT_FULL=1 to run the exhaustive
// 2^12-sequence sweep of criterion 1 instead of the 256-sequence CI gate.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wzis/codec.hpp"
#include "wzis/config_io.hpp"
#include "wzis/empirical.hpp"
#include "wzis/error.hpp"
#include "wzis/experiment.hpp"
#include "wzis/fsm_search.hpp"
#include "wzis/growth.hpp"
#include "wzis/sr.hpp"
#include "wzis/wz_solver.hpp"

using namespace wzis;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

Sequence random_binary(std::int64_t n, Seed seed, double p1 = 0.5) {
  Rng rng(seed);
  std::vector<int> xs(static_cast<std::size_t>(n));
  for (auto& v : xs) v = rng.next_unit() < p1 ? 1 : 0;
  return Sequence(xs, 2);
}

// ---- criterion 1 + 4: Theorem 1 sweep and zero-rate consistency ------------

Theorem1Report g_t1_report;

void criterion_1_and_4() {
  Theorem1Options opt;
  opt.n = 12;
  const bool full = std::getenv("WZIS_ACCEPT_FULL") != nullptr;
  opt.sample = full ? 0 : 256;
  opt.channels = {"identity:2", "bsc:0.1", "bsc:0.3"};
  opt.rates = {0.0, 0.25, 0.5, 1.0};
  opt.blocks = {2, 4};
  opt.max_states = 2;
  opt.max_delay = 1;
  opt.max_len = 2;
  opt.seed = 20260809;
  g_t1_report = run_theorem1_check(opt);

  std::ostringstream d1;
  d1 << g_t1_report.sequences << " sequences, " << g_t1_report.checks << " checks, "
     << g_t1_report.violations << " violations, min margin " << g_t1_report.min_margin;
  report(1, "Theorem 1 inequality sweep", g_t1_report.violations == 0, d1.str());
}

void criterion_4() {
  std::ostringstream d;
  d << g_t1_report.zero_rate_checks << " checks, max gap " << g_t1_report.max_zero_rate_gap;
  report(4, "zero-rate consistency with Bayes denoising",
         g_t1_report.zero_rate_checks > 0 && g_t1_report.zero_rate_mismatches == 0, d.str());
}

// ---- criterion 2: solver vs brute force oracle ------------------------------

void criterion_2() {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  int bad = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    Rng rng(derive_seed(42, "c2_instance", static_cast<std::uint64_t>(inst)));
    const int ell = inst % 2 == 0 ? 1 : 2;
    const std::int64_t na = ell == 1 ? 2 : 4;
    BlockDistribution src;
    src.block_len = ell;
    src.alphabet = 2;
    src.probs.resize(static_cast<std::size_t>(na));
    double sum = 0.0;
    for (auto& v : src.probs) sum += (v = rng.next_unit() + 0.02);
    for (auto& v : src.probs) v /= sum;
    const double eps = 0.03 + 0.44 * rng.next_unit();
    const auto joint = join_with_channel(src, binary_symmetric_channel(eps));
    const int usize = std::min<std::int64_t>(5, na + 1);

    const RdCurve oracle = brute_force_drf(joint, ham, usize);
    const RdCurve solver = drf_curve_adaptive(joint, ham, usize,
                                              derive_seed(42, "c2_solver", inst), 64, 64);
    // two-sided hull vertex match within 1e-6 in both coordinates
    auto match = [&](const RdCurve& from, const RdCurve& to) {
      for (int hv : from.hull()) {
        const auto& v = from.points()[static_cast<std::size_t>(hv)];
        bool found = false;
        for (int sv : to.hull()) {
          const auto& w = to.points()[static_cast<std::size_t>(sv)];
          if (std::abs(w.rate - v.rate) <= 1e-6 && std::abs(w.distortion - v.distortion) <= 1e-6)
            found = true;
        }
        if (!found) {
          worst = std::max(worst, 1.0);
          return false;
        }
      }
      return true;
    };
    if (!match(oracle, solver) || !match(solver, oracle)) ++bad;
  }
  std::ostringstream d;
  d << "50 instances, " << bad << " hull mismatches";
  report(2, "solver/oracle hull equivalence", bad == 0, d.str());
}

// ---- criterion 3: universal codec rate bound and distortion -----------------

void criterion_3() {
  int rate_bad = 0, dist_bad = 0;
  // ell = 3 needs 3 | n; 1023 = 3 * 341 stands in for the 1024 of the ell = 2
  // corpora, which 3 does not divide.
  struct Corpus {
    std::int64_t n;
    int ell;
  };
  const std::vector<Corpus> corpora{{1024, 2}, {1023, 3}};
  int idx = 0;
  for (const Corpus& c : corpora) {
    for (int k = 0; k < 10; ++k, ++idx) {
      const double p1 = 0.2 + 0.06 * k;
      const Sequence x = random_binary(c.n, derive_seed(7, "c3_corpus", idx), p1);
      CodecConfig cfg;
      cfg.block_len = c.ell;
      cfg.rate = 0.5;
      cfg.restarts = 8;
      cfg.solver_seed = 31;
      cfg.lambdas = LambdaGridSpec::parse("auto:24");
      cfg.channel = binary_symmetric_channel(0.2);
      cfg.rho = DistortionMatrix::hamming(2);

      const EncodedStream stream = uc_encode(x, cfg, 1);
      const double n = static_cast<double>(x.size());
      const double A = std::pow(2.0, c.ell);
      const double bound =
          cfg.rate + 1.0 / c.ell + (A / n) * std::log2(n / c.ell + 1.0) + 1.0 / n;
      if (static_cast<double>(stream.bits.bit_size()) / n > bound + 1e-9) ++rate_bad;

      // Monte Carlo distortion vs the design point, 100 channel seeds
      const CodeDesign design = design_code(block_empirical(x, c.ell), cfg);
      const int seeds = 100;
      std::vector<double> vals(seeds);
      double mean = 0.0;
      for (int s = 0; s < seeds; ++s) {
        const Sequence y =
            sample_side_info(x, cfg.channel, derive_seed(7, "c3_side", idx * 1000 + s));
        const Sequence xhat = uc_decode(stream, y, cfg);
        vals[static_cast<std::size_t>(s)] = average_distortion(x, xhat, cfg.rho);
        mean += vals[static_cast<std::size_t>(s)];
      }
      mean /= seeds;
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      var /= (seeds - 1);
      const double se = std::sqrt(var / seeds);
      if (std::abs(mean - design.low.distortion) > 3 * std::max(se, 1e-12)) ++dist_bad;
    }
  }
  std::ostringstream d;
  d << "20 corpora, " << rate_bad << " rate-bound failures, " << dist_bad
    << " distortion-mismatch failures";
  report(3, "universal codec rate bound and design distortion", rate_bad == 0 && dist_bad == 0,
         d.str());
}

// ---- criterion 5: DMS block-length monotonicity -----------------------------

void criterion_5() {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  int bad = 0;
  double worst = -1.0;
  for (int inst = 0; inst < 10; ++inst) {
    Rng rng(derive_seed(55, "c5_instance", static_cast<std::uint64_t>(inst)));
    const double p1 = 0.2 + 0.6 * rng.next_unit();
    const double eps = 0.05 + 0.4 * rng.next_unit();
    const std::vector<double> pmf{1 - p1, p1};
    const Channel ch = binary_symmetric_channel(eps);
    const auto j1 = join_with_channel(product_block_distribution(pmf, 1), ch);
    const auto j2 = join_with_channel(product_block_distribution(pmf, 2), ch);
    const RdCurve c1 = drf_curve_adaptive(j1, ham, 3, derive_seed(55, "c5_s1", inst), 64, 48);
    const RdCurve c2 = drf_curve_adaptive(j2, ham, 5, derive_seed(55, "c5_s2", inst), 64, 48);
    for (int i = 0; i <= 10; ++i) {
      const double r = 0.1 * i;
      const double gap = c2.query(r) - c1.query(r);
      worst = std::max(worst, gap);
      if (gap > 1e-9) ++bad;
    }
  }
  std::ostringstream d;
  d << "10 DMS instances x 11 rates, worst gap " << worst;
  report(5, "block-length monotonicity for product sources", bad == 0, d.str());
}

// ---- criterion 6: section-4 accounting -------------------------------------

void criterion_6() {
  bool ok = decoder_description_bits(2, 2, 2, 2) == 18 && decoder_description_bits(1, 2, 2, 2) == 5;
  std::vector<std::uint64_t> ns{1000, 10'000, 100'000, 1'000'000, 10'000'000};
  const auto low = theta_sweep(0.5, ns, 2, 2, 2);
  for (std::size_t i = 1; i < low.size(); ++i)
    ok = ok && low[i].bits_per_symbol < low[i - 1].bits_per_symbol;
  const auto high = theta_sweep(1.5, ns, 2, 2, 2);
  for (std::size_t i = 1; i < high.size(); ++i)
    ok = ok && high[i].bits_per_symbol > high[i - 1].bits_per_symbol;
  std::ostringstream d;
  d << "header bits (2,2,2,2) = " << decoder_description_bits(2, 2, 2, 2)
    << ", (1,2,2,2) = " << decoder_description_bits(1, 2, 2, 2);
  report(6, "decoder-description accounting and theta sweeps", ok, d.str());
}

// ---- criterion 7: maxent vs closed-form binary entropy ----------------------

void criterion_7() {
  const std::vector<double> ham{0.0, 1.0};
  double worst = 0.0;
  for (double delta : {0.05, 0.11, 0.25, 0.5}) {
    const auto s = maxent_distribution(ham, delta);
    worst = std::max(worst, std::abs(s.phi - h2(delta)));
  }
  std::ostringstream d;
  d << "max |phi - h2| = " << worst;
  report(7, "maximum-entropy phi matches binary entropy", worst <= 1e-6, d.str());
}

// ---- criterion 8: SR region consistency -------------------------------------

void criterion_8() {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  int bad = 0;
  for (int inst = 0; inst < 10; ++inst) {
    Rng rng(derive_seed(88, "c8_instance", static_cast<std::uint64_t>(inst)));
    const double p1 = 0.25 + 0.5 * rng.next_unit();
    const double ey = 0.05 + 0.35 * rng.next_unit();
    const double ez = 0.05 + 0.35 * rng.next_unit();
    BlockDistribution src;
    src.block_len = 1;
    src.alphabet = 2;
    src.probs = {1 - p1, p1};
    // independent product P(y,z|x)
    const Channel cy = binary_symmetric_channel(ey);
    const Channel cz = binary_symmetric_channel(ez);
    std::vector<std::vector<double>> rows;
    for (int x = 0; x < 2; ++x) {
      std::vector<double> row;
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z) row.push_back(cy.prob(x, y) * cz.prob(x, z));
      rows.push_back(std::move(row));
    }
    const TwoSidedChannel ch3 = validate_two_sided(rows, 2, 2);

    // first stage: constant U, i.e. the pure denoising stage
    const auto joint_y = join_with_channel(src, cy);
    WzCode first;
    first.usize = 1;
    first.assignment = {0, 0};
    first.marginal = {1.0};
    first.reconstruction = optimal_reconstruction(joint_y, first.rows(2), 1, ham);

    SrCaps caps;
    caps.max_v = 3;
    for (double lambda2 : {0.0, 0.1, 0.5, 1e6}) {
      const auto pt = conditional_second_stage(src, ch3, ham, ham, first, lambda2, caps,
                                               derive_seed(88, "c8_sr", inst), 32);
      const auto frontier = brute_force_sr_region(src, ch3, ham, ham, pt.hu + 1e-12,
                                                  pt.hv_given_u + 1e-12);
      double best_d2 = 1e100;
      for (const auto& q : frontier)
        if (q.d1 <= pt.d1 + 1e-9) best_d2 = std::min(best_d2, q.d2);
      if (pt.d2 < best_d2 - 1e-6) ++bad;  // descent must not beat the exact region
    }
    // delta-rate 0: the frontier matches reconstruction from U alone
    const auto f0 = brute_force_sr_region(src, ch3, ham, ham, 1.0, 0.0);
    // reconstruction from (Z, U) with U = X (best rate-1 first stage)
    const auto joint_z = join_with_channel(src, cz);
    WzCode ident;
    ident.usize = 2;
    ident.assignment = {0, 1};
    ident.marginal = src.probs;
    ident.reconstruction = optimal_reconstruction(joint_z, ident.rows(2), 2, ham);
    const double d2_from_u = code_distortion(joint_z, ham, ident);
    bool found = false;
    for (const auto& q : f0)
      if (std::abs(q.d2 - d2_from_u) <= 1e-6) found = true;
    if (!found) ++bad;
  }
  std::ostringstream d;
  d << "10 instances, " << bad << " inconsistencies";
  report(8, "successive-refinement region consistency", bad == 0, d.str());
}

// ---- criterion 9: CLI determinism -------------------------------------------

std::string hash_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (f.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void criterion_9() {
#ifndef WZIS_CLI_PATH
  report(9, "experiment determinism", false, "CLI path not configured");
  return;
#else
  namespace fs = std::filesystem;
  const std::string cli = WZIS_CLI_PATH;
  const fs::path base = fs::temp_directory_path() / "wzis_accept_det";
  fs::remove_all(base);
  fs::create_directories(base);

  // corpus for file-driven commands
  {
    std::ofstream f(base / "x.json");
    f << R"({"alphabet_x": 2, "sequence": [)";
    for (int i = 0; i < 64; ++i) f << (i * 7 % 5 == 0 ? 1 : 0) << (i + 1 < 64 ? "," : "");
    f << "]}";
    std::ofstream g(base / "y.json");
    g << R"({"alphabet_x": 2, "sequence": [)";
    for (int i = 0; i < 64; ++i) g << (i * 3 % 7 == 0 ? 1 : 0) << (i + 1 < 64 ? "," : "");
    g << "]}";
  }

  struct Cmd {
    std::string name;
    std::string args;
    std::vector<std::string> artifacts;
  };
  const std::string x = (base / "x.json").string();
  const std::string y = (base / "y.json").string();
  const std::vector<Cmd> cmds{
      {"drf", "drf --dms 0.4,0.6 --channel bsc:0.2 --block 2 --seed 5 --restarts 8",
       {"drf_curve.csv", "summary.json"}},
      {"fsm-opt",
       "fsm-opt --input " + x + " --channel bsc:0.2 --states 1 --delay 0 --lmax 1 --rate 0.5",
       {"fsm_opt.json", "summary.json"}},
      {"codec-encode",
       "codec encode --input " + x + " --channel bsc:0.1 --block 2 --rate 1 --solver-seed 3",
       {"codec_stream.bin", "codec_encode.json", "summary.json"}},
      {"gen-dms", "gen dms --probs 0.3,0.7 --n 128 --seed 11", {"dms.json", "summary.json"}},
      {"growth-sweep", "growth sweep --theta 0.5 --ns 1000,10000,100000",
       {"theta_sweep.csv", "summary.json"}},
      {"check-theorem1", "check theorem1 --n 8 --sample 6 --states 1 --delay 0 --lmax 1",
       {"theorem1.csv", "summary.json"}},
  };

  bool ok = true;
  std::string detail;
  for (const Cmd& cmd : cmds) {
    std::vector<std::string> hashes[2];
    for (int round = 0; round < 2; ++round) {
      const fs::path dir = base / (cmd.name + "_" + std::to_string(round));
      fs::create_directories(dir);
      const std::string full = "\"" + cli + "\" " + cmd.args + " --out-dir \"" + dir.string() +
                               "\" > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
      const int rc = std::system(full.c_str());
      if (rc != 0) {
        ok = false;
        detail = cmd.name + " exited with " + std::to_string(rc);
        break;
      }
      for (const auto& a : cmd.artifacts)
        hashes[round].push_back(hash_file((dir / a).string()));
    }
    if (!ok) break;
    if (hashes[0] != hashes[1]) {
      ok = false;
      detail = cmd.name + " artifacts differ between runs";
      break;
    }
  }
  report(9, "experiment determinism (byte-identical artifacts)", ok, detail);
#endif
}

}  // namespace

int main() {
  criterion_1_and_4();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  }
  return g_failures;
}
