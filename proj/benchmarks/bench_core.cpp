#include <benchmark/benchmark.h>

#include <random>

#include "mazescope/analysis/clustering.hpp"
#include "mazescope/analysis/dataset.hpp"
#include "mazescope/analysis/grand_tour.hpp"
#include "mazescope/analysis/saliency.hpp"
#include "mazescope/maze/maze.hpp"
#include "mazescope/maze/render.hpp"
#include "mazescope/nn/forward.hpp"
#include "mazescope/nn/layers.hpp"
#include "mazescope/nn/weights.hpp"

using namespace mazescope;

namespace {

const nn::NetworkSpec& spec() {
  static const auto s = nn::NetworkSpec::impala();
  return s;
}

const nn::WeightStore& weights() {
  static const auto w = nn::init_random_weights(spec(), 0);
  return w;
}

const Tensor& observation() {
  static const auto obs = maze::render_observation(maze::generate_kruskal(42, 15));
  return obs;
}

Tensor filled(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = u(rng);
  return t;
}

const analysis::PixelDataset& block1_pixels() {
  static const auto d = analysis::flatten_activations(
      nn::forward_with_capture(spec(), weights(), observation(), {"block1.conv"}), "block1.conv");
  return d;
}

void BM_Conv3x3(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto hw = static_cast<std::size_t>(state.range(1));
  const auto x = filled({c, hw, hw}, 1);
  const auto k = filled({c, c, 3, 3}, 2);
  const auto b = filled({c}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d_forward(x, k, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c * c * 9 * hw * hw));
}
BENCHMARK(BM_Conv3x3)->Args({16, 64})->Args({64, 32})->Args({128, 16})->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward_with_capture(spec(), weights(), observation()));
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMillisecond);

void BM_Backward(benchmark::State& state) {
  const auto ctx = nn::forward_for_gradient(spec(), weights(), observation());
  const nn::GradientTarget target = nn::ProbabilityGroupTarget{{5}};
  for (auto _ : state) benchmark::DoNotOptimize(nn::backward_to_input(spec(), weights(), ctx, target));
}
BENCHMARK(BM_Backward)->Unit(benchmark::kMillisecond);

void BM_KMeansBlock1(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(analysis::kmeans(block1_pixels(), {.k = k, .seed = 1}));
}
BENCHMARK(BM_KMeansBlock1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Agglomerative(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  analysis::PixelDataset d = block1_pixels();
  d.width = n;
  d.height = 1;
  d.values.resize(n * d.channels);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::agglomerative(d, {.threshold = std::nullopt, .count = 1}));
  }
}
BENCHMARK(BM_Agglomerative)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_GrandTourStep(benchmark::State& state) {
  auto s = analysis::ProjectionState::initial(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    s = analysis::grand_tour_step(s, 0.01);
    benchmark::DoNotOptimize(s.basis.data());
  }
}
BENCHMARK(BM_GrandTourStep)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
