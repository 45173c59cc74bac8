#include <benchmark/benchmark.h>

#include <random>

#include "lesionforge/augment.hpp"
#include "lesionforge/gamma.hpp"
#include "lesionforge/pipeline.hpp"

using namespace lesionforge;

namespace {

Volume3D noise_volume(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<double> data(n * n * n);
  for (auto& x : data) x = u(rng);
  return Volume3D({n, n, n}, {}, std::move(data));
}

Mask3D sphere_mask(std::size_t n) {
  const Dims d{n, n, n};
  std::vector<std::uint8_t> bits(d.count());
  const double c = n / 2.0, r = n / 6.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = i - c, dy = j - c, dz = k - c;
        bits[linear_index(d, i, j, k)] = dx * dx + dy * dy + dz * dz <= r * r;
      }
  return Mask3D(d, std::move(bits));
}

void set_voxels(benchmark::State& state, std::size_t n) {
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

}  // namespace

static void BM_GammaGlobal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto v = noise_volume(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gamma_global(v, 0.8));
  set_voxels(state, n);
}
BENCHMARK(BM_GammaGlobal)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_GammaLocal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto v = noise_volume(n, 2);
  const auto m = sphere_mask(n);
  for (auto _ : state) benchmark::DoNotOptimize(gamma_local(v, m, 0.8));
  set_voxels(state, n);
}
BENCHMARK(BM_GammaLocal)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_MinmaxMasked(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto v = noise_volume(n, 3);
  const auto m = sphere_mask(n);
  for (auto _ : state) benchmark::DoNotOptimize(minmax_masked(v, m));
  set_voxels(state, n);
}
BENCHMARK(BM_MinmaxMasked)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_GaussianBlur(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto v = noise_volume(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(op_gaussian_blur(v, 1.0));
  set_voxels(state, n);
}
BENCHMARK(BM_GaussianBlur)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Pipeline(benchmark::State& state) {
  const std::size_t n = 128;
  const Study study(Study::ChannelMap{{"b1000", noise_volume(n, 5)}, {"flair", noise_volume(n, 6)}},
                    sphere_mask(n));
  PipelineConfig config;
  config.seed = 9;
  for (const char* kind : {"local-gamma", "mirror", "gaussian-noise", "brightness", "contrast"}) {
    config.ops.push_back(default_op(kind));
  }
  std::uint64_t sample = 0;
  for (auto _ : state) benchmark::DoNotOptimize(apply_pipeline(study, config, sample++));
  set_voxels(state, n);
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
