#pragma once

// Behavioral model of the in-memory accelerator: 64x64 crossbar tiles for
// encoding, 64x64 MCAM tiles for associative search, and bit-flip noise in
// the stored/computed P-bit codes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mimhd/encoder.hpp"
#include "mimhd/hypervector.hpp"
#include "mimhd/similarity.hpp"
#include "mimhd/trainer.hpp"

namespace mimhd {

inline constexpr std::size_t kArraySize = 64;

struct TilingReport {
  std::size_t features = 0;
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::size_t array_rows = kArraySize;
  std::size_t array_cols = kArraySize;
  // n * ceil(D/64): one group of D/64 arrays per feature, each holding the
  // m <= 64 level HVs for a 64-dimension slice.
  std::size_t crossbar_arrays = 0;
  // ceil(D/64) * ceil(k/64)
  std::size_t mcam_arrays = 0;
  std::size_t adc_conversions_per_encode = 0;  // = D
  std::size_t mcam_rows_used = 0;              // = k * ceil(D/64)
  std::size_t crossbar_activations_per_encode = 0;
  std::size_t mcam_searches_per_query = 0;
  bool partial_tiles = false;  // D not a multiple of 64

  friend bool operator==(const TilingReport&, const TilingReport&) = default;
};

// Warns (does not throw) when D is not a multiple of 64.
[[nodiscard]] TilingReport tile(std::size_t features, std::size_t dim, std::size_t classes);
[[nodiscard]] TilingReport tile(const EncoderConfig& cfg, std::size_t classes);

enum class NoiseTarget : std::uint8_t {
  encoded_query = 1U << 0U,
  class_hvs = 1U << 1U,
};

struct NoiseTargets {
  std::uint8_t bits = static_cast<std::uint8_t>(NoiseTarget::encoded_query) |
                      static_cast<std::uint8_t>(NoiseTarget::class_hvs);

  [[nodiscard]] bool has(NoiseTarget t) const noexcept { return (bits & static_cast<std::uint8_t>(t)) != 0; }
  [[nodiscard]] bool empty() const noexcept { return bits == 0; }
};

struct NoiseSpec {
  double flip_rate = 0.0;
  NoiseTargets targets;
  RngSeed seed;

  // Throws invalid-config for a rate outside [0, 1] or an empty target set.
  void validate() const;
};

// Each of the D * P stored bits flips independently with probability `rate`.
[[nodiscard]] Hypervector inject_noise(const Hypervector& hv, double rate, Rng& rng);
[[nodiscard]] Hypervector inject_noise(const Hypervector& hv, const NoiseSpec& spec);

// P-bit class copy replaced by noisy codes; real copy untouched.
[[nodiscard]] Model inject_noise(const Model& model, const NoiseSpec& spec);

struct RobustnessRow {
  double rate = 0.0;
  double clean_accuracy = 0.0;
  double mean_noisy_accuracy = 0.0;
  double mean_loss = 0.0;  // clean - noisy, averaged over trials
  double loss_stddev = 0.0;
  std::size_t trials = 0;
};

// Trial t at rate index r draws from derive_seed(derive_seed(seed, r), t):
// class noise from its stream 0, query i from stream i + 1. Rate 0 skips
// injection so its loss is exactly 0.
[[nodiscard]] std::vector<RobustnessRow> robustness_experiment(const Model& model, std::span<const LabeledHv> test,
                                                               Metric metric, const McamKernel* kernel,
                                                               std::span<const double> rates, std::size_t trials,
                                                               RngSeed seed, NoiseTargets targets = {});

}  // namespace mimhd
