#include "mimhd/hardware.hpp"

#include <cmath>
#include <string>

#include "mimhd/error.hpp"
#include "mimhd/parallel.hpp"

namespace mimhd {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

TilingReport tile(std::size_t features, std::size_t dim, std::size_t classes) {
  if (features == 0 || dim == 0 || classes == 0) {
    throw Error(ErrorKind::invalid_config, "tiling needs n >= 1, D >= 1 and k >= 1");
  }
  TilingReport r;
  r.features = features;
  r.dim = dim;
  r.classes = classes;
  const std::size_t column_tiles = ceil_div(dim, kArraySize);
  r.crossbar_arrays = features * column_tiles;
  r.mcam_arrays = column_tiles * ceil_div(classes, kArraySize);
  r.adc_conversions_per_encode = dim;
  r.mcam_rows_used = classes * column_tiles;
  r.crossbar_activations_per_encode = r.crossbar_arrays;
  r.mcam_searches_per_query = r.mcam_arrays;
  r.partial_tiles = dim % kArraySize != 0;
  if (r.partial_tiles) {
    warn("D=" + std::to_string(dim) + " is not a multiple of 64; partial arrays are counted as whole arrays");
  }
  return r;
}

TilingReport tile(const EncoderConfig& cfg, std::size_t classes) { return tile(cfg.features, cfg.dim, classes); }

void NoiseSpec::validate() const {
  if (!(flip_rate >= 0.0 && flip_rate <= 1.0)) throw Error(ErrorKind::invalid_config, "flip rate must lie in [0, 1]");
  if (targets.empty()) throw Error(ErrorKind::invalid_config, "noise spec needs at least one target");
}

Hypervector inject_noise(const Hypervector& hv, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw Error(ErrorKind::invalid_config, "flip rate must lie in [0, 1]");
  if (rate == 0.0) return hv;
  const int bits = hv.precision().bits();
  std::vector<std::uint8_t> codes(hv.components().begin(), hv.components().end());
  if (rate == 1.0) {
    for (auto& c : codes) c ^= hv.precision().max_code();
    return Hypervector(hv.precision(), std::move(codes));
  }
  for (auto& c : codes) {
    for (int b = 0; b < bits; ++b) {
      if (rng.unit() < rate) c ^= static_cast<std::uint8_t>(1U << b);
    }
  }
  return Hypervector(hv.precision(), std::move(codes));
}

Hypervector inject_noise(const Hypervector& hv, const NoiseSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  return inject_noise(hv, spec.flip_rate, rng);
}

Model inject_noise(const Model& model, const NoiseSpec& spec) {
  spec.validate();
  if (!spec.targets.has(NoiseTarget::class_hvs)) return model;
  Rng rng(spec.seed);
  std::vector<Hypervector> noisy;
  noisy.reserve(model.classes());
  for (const auto& c : model.quant_classes()) noisy.push_back(inject_noise(c, spec.flip_rate, rng));
  return model.with_quant_classes(std::move(noisy));
}

std::vector<RobustnessRow> robustness_experiment(const Model& model, std::span<const LabeledHv> test, Metric metric,
                                                 const McamKernel* kernel, std::span<const double> rates,
                                                 std::size_t trials, RngSeed seed, NoiseTargets targets) {
  if (rates.empty()) throw Error(ErrorKind::invalid_input, "robustness experiment needs at least one rate");
  if (trials < 1) throw Error(ErrorKind::invalid_input, "robustness experiment needs trials >= 1");
  if (targets.empty()) throw Error(ErrorKind::invalid_config, "noise spec needs at least one target");
  for (double r : rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorKind::invalid_config, "flip rate must lie in [0, 1]");
  }

  const double clean = evaluate(model, test, metric, kernel);
  std::vector<RobustnessRow> rows;
  rows.reserve(rates.size());
  for (std::size_t r = 0; r < rates.size(); ++r) {
    RobustnessRow row;
    row.rate = rates[r];
    row.clean_accuracy = clean;
    row.trials = trials;
    if (rates[r] == 0.0) {
      row.mean_noisy_accuracy = clean;
      rows.push_back(row);
      continue;
    }
    const RngSeed rate_seed = derive_seed(seed, r);
    std::vector<double> losses(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      const RngSeed trial_seed = derive_seed(rate_seed, t);
      const Model noisy_model =
          inject_noise(model, NoiseSpec{rates[r], targets, derive_seed(trial_seed, 0)});
      std::vector<std::uint8_t> hit(test.size(), 0);
      parallel_for(test.size(), [&](std::size_t i) {
        const Hypervector& q = test[i].hv;
        int predicted = 0;
        if (targets.has(NoiseTarget::encoded_query)) {
          Rng rng(derive_seed(trial_seed, i + 1));
          predicted = classify(inject_noise(q, rates[r], rng), noisy_model, metric, kernel).label;
        } else {
          predicted = classify(q, noisy_model, metric, kernel).label;
        }
        hit[i] = predicted == test[i].label ? 1 : 0;
      });
      std::size_t correct = 0;
      for (auto h : hit) correct += h;
      const double noisy = static_cast<double>(correct) / static_cast<double>(test.size());
      losses[t] = clean - noisy;
      row.mean_noisy_accuracy += noisy / static_cast<double>(trials);
    }
    double mean = 0.0;
    for (double l : losses) mean += l;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double l : losses) var += (l - mean) * (l - mean);
    row.mean_loss = mean;
    row.loss_stddev = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mimhd
