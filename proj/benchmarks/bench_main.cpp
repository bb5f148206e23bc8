#include <benchmark/benchmark.h>

#include <vector>

#include "mimhd/encoder.hpp"
#include "mimhd/hardware.hpp"
#include "mimhd/similarity.hpp"
#include "mimhd/trainer.hpp"

namespace {

using namespace mimhd;

// ISOLET-shaped encoder: n=617 features, m=64 levels.
Encoder make_encoder(std::size_t dim, int bits) {
  EncoderConfig cfg;
  cfg.dim = dim;
  cfg.precision = Precision(bits);
  cfg.features = 617;
  cfg.seed = RngSeed{1};
  Encoder enc(cfg, FeatureQuantizer(std::vector<double>(617, 0.0), std::vector<double>(617, 1.0), 64));
  Rng rng(RngSeed{2});
  std::vector<double> rows(617 * 64);
  for (auto& v : rows) v = rng.unit();
  enc.calibrate(FeatureRows{rows, 617});
  return enc;
}

void BM_Encode(benchmark::State& state) {
  const auto enc = make_encoder(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
  Rng rng(RngSeed{3});
  std::vector<double> f(617);
  for (auto& v : f) v = rng.unit();
  for (auto _ : state) benchmark::DoNotOptimize(enc.encode(f));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Encode)->Args({1000, 1})->Args({4000, 2})->Args({4000, 3})->Args({8000, 3});

void BM_Classify(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto metric = static_cast<Metric>(state.range(1));
  const Precision p(3);
  Rng rng(RngSeed{4});
  std::vector<int> labels;
  std::vector<RealHypervector> classes;
  for (int c = 0; c < 26; ++c) {
    labels.push_back(c);
    classes.push_back(RealHypervector::from(random_hv(dim, p, rng)));
  }
  const Model model(labels, classes, p);
  const auto kernel = McamKernel::for_precision(p);
  const auto q = random_hv(dim, p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(classify(q, model, metric, &kernel));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Classify)
    ->Args({4000, static_cast<int>(Metric::cosine)})
    ->Args({4000, static_cast<int>(Metric::hamming)})
    ->Args({4000, static_cast<int>(Metric::mcam)});

void BM_InjectNoise(benchmark::State& state) {
  Rng rng(RngSeed{5});
  const auto hv = random_hv(4000, Precision(3), rng);
  for (auto _ : state) benchmark::DoNotOptimize(inject_noise(hv, 0.1, rng));
}
BENCHMARK(BM_InjectNoise);

}  // namespace

BENCHMARK_MAIN();
