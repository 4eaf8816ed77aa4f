#include <benchmark/benchmark.h>

#include "wzis/codec.hpp"
#include "wzis/empirical.hpp"
#include "wzis/fsm_search.hpp"
#include "wzis/wz_solver.hpp"

namespace {

using namespace wzis;

Sequence random_binary(std::int64_t n, Seed seed) {
  Rng rng(seed);
  std::vector<int> xs(static_cast<std::size_t>(n));
  for (auto& v : xs) v = static_cast<int>(rng.next_below(2));
  return Sequence(xs, 2);
}

void BM_SolveLagrangian(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  const Sequence x = random_binary(1024, 7);
  const auto joint = join_with_channel(block_empirical(x, ell), binary_symmetric_channel(0.2));
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  for (auto _ : state) {
    auto pt = solve_lagrangian(joint, ham, 0.3, static_cast<int>(joint.na) + 1, 3, 4);
    benchmark::DoNotOptimize(pt.distortion);
  }
}
BENCHMARK(BM_SolveLagrangian)->Arg(2)->Arg(3)->Arg(4);

void BM_AdaptiveCurve(benchmark::State& state) {
  const Sequence x = random_binary(1024, 9);
  const auto joint = join_with_channel(block_empirical(x, 2), binary_symmetric_channel(0.2));
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  for (auto _ : state) {
    auto curve = drf_curve_adaptive(joint, ham, 5, 3, 8, 24);
    benchmark::DoNotOptimize(curve.query(0.5));
  }
}
BENCHMARK(BM_AdaptiveCurve);

void BM_OperationalSweep(benchmark::State& state) {
  const Sequence x = random_binary(12, 11);
  const Channel ch = binary_symmetric_channel(0.1);
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  SearchGrid grid;
  grid.max_states = static_cast<int>(state.range(0));
  grid.max_delay = 1;
  grid.max_len = 2;
  grid.budget = 100'000'000'000ULL;
  std::vector<BucketSpec> buckets;
  for (double r : {0.0, 0.25, 0.5, 1.0})
    for (int m = 1; m <= grid.max_states; ++m)
      for (int d = 0; d <= 1; ++d) buckets.push_back({r, m, d});
  for (auto _ : state) {
    auto res = operational_optimum_batch(x, buckets, grid, ch, ham);
    benchmark::DoNotOptimize(res.front().distortion);
  }
}
BENCHMARK(BM_OperationalSweep)->Arg(1)->Arg(2);

void BM_TypeHeaderRoundtrip(benchmark::State& state) {
  const Sequence x = random_binary(1024, 13);
  const auto type = block_empirical(x, 2);
  for (auto _ : state) {
    const Bitstream bits = encode_type(type, x.size());
    auto back = decode_type(bits, x.size(), 2, 2);
    benchmark::DoNotOptimize(back.probs[0]);
  }
}
BENCHMARK(BM_TypeHeaderRoundtrip);

void BM_CodecEncode(benchmark::State& state) {
  const Sequence x = random_binary(1024, 15);
  CodecConfig cfg;
  cfg.block_len = 2;
  cfg.rate = 0.5;
  cfg.restarts = 4;
  cfg.solver_seed = 1;
  cfg.lambdas = LambdaGridSpec::parse("auto:16");
  cfg.channel = binary_symmetric_channel(0.2);
  cfg.rho = DistortionMatrix::hamming(2);
  for (auto _ : state) {
    auto stream = uc_encode(x, cfg, 1);
    benchmark::DoNotOptimize(stream.bits.bit_size());
  }
}
BENCHMARK(BM_CodecEncode);

}  // namespace

BENCHMARK_MAIN();
