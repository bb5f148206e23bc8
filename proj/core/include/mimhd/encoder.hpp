#pragma once

// Record-based multi-level encoder:
//   S_d = sum_k L(f_k)[d] * B_k[d]   (exact integer accumulation)
//   H_d = ADC(S_d)                    (P-bit requantization over [adc_lo, adc_hi])

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mimhd/hypervector.hpp"

namespace mimhd {

// Row-major view of a feature matrix; each row is one FeatureVector.
struct FeatureRows {
  std::span<const double> values;
  std::size_t cols = 0;

  [[nodiscard]] std::size_t rows() const noexcept { return cols == 0 ? 0 : values.size() / cols; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const { return values.subspan(i * cols, cols); }
};

// Per-feature linear binning into m levels. A feature with lo == hi is
// constant on the training split and always maps to level 0.
class FeatureQuantizer {
 public:
  FeatureQuantizer(std::vector<double> lo, std::vector<double> hi, int levels);

  [[nodiscard]] std::size_t features() const noexcept { return lo_.size(); }
  [[nodiscard]] int levels() const noexcept { return levels_; }
  [[nodiscard]] std::span<const double> lo() const noexcept { return lo_; }
  [[nodiscard]] std::span<const double> hi() const noexcept { return hi_; }

  [[nodiscard]] std::uint32_t level_index(std::size_t feature, double value) const noexcept;

  friend bool operator==(const FeatureQuantizer&, const FeatureQuantizer&) = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
  int levels_;
};

struct AdcRange {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool calibrated() const noexcept { return lo < hi; }
  friend bool operator==(const AdcRange&, const AdcRange&) = default;
};

// How the crossbar interprets stored P-bit codes during multiply-accumulate.
//   unsigned_codes: c in {0, ..., 2^P - 1}
//   zero_centered:  2c - (2^P - 1), i.e. odd values symmetric about 0
//                   (P=1 gives the bipolar +-1 of binary HDC)
enum class CodeInterpretation { unsigned_codes, zero_centered };

std::string_view to_string(CodeInterpretation c) noexcept;
CodeInterpretation parse_code_interpretation(std::string_view name);

struct EncoderConfig {
  static constexpr int kDefaultLevels = 64;

  std::size_t dim = 4000;
  Precision precision{2};
  // Base HVs default to the query precision; overridable to model binary
  // select lines driving the crossbar.
  std::optional<Precision> base_precision;
  int levels = kDefaultLevels;
  // Centered by default: with unsigned codes the shared level table dominates
  // every sum and the per-feature information is a small ripple on top.
  CodeInterpretation arithmetic = CodeInterpretation::zero_centered;
  std::size_t features = 1;
  AdcRange adc;
  RngSeed seed;

  [[nodiscard]] Precision effective_base_precision() const noexcept { return base_precision.value_or(precision); }
  // Throws invalid-config unless dim >= levels >= 2 and features >= 1.
  void validate() const;
};

class LevelTable {
 public:
  explicit LevelTable(std::vector<Hypervector> levels);

  [[nodiscard]] std::size_t size() const noexcept { return levels_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return levels_.front().dim(); }
  [[nodiscard]] Precision precision() const noexcept { return levels_.front().precision(); }
  [[nodiscard]] const Hypervector& operator[](std::size_t i) const { return levels_[i]; }
  [[nodiscard]] std::span<const Hypervector> rows() const noexcept { return levels_; }

  friend bool operator==(const LevelTable&, const LevelTable&) = default;

 private:
  std::vector<Hypervector> levels_;
};

class BaseMatrix {
 public:
  explicit BaseMatrix(std::vector<Hypervector> bases);

  [[nodiscard]] std::size_t size() const noexcept { return bases_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return bases_.front().dim(); }
  [[nodiscard]] Precision precision() const noexcept { return bases_.front().precision(); }
  [[nodiscard]] const Hypervector& operator[](std::size_t i) const { return bases_[i]; }
  [[nodiscard]] std::span<const Hypervector> rows() const noexcept { return bases_; }

  friend bool operator==(const BaseMatrix&, const BaseMatrix&) = default;

 private:
  std::vector<Hypervector> bases_;
};

// Level 1 is uniformly random; level j+1 copies level j and redraws
// floor(D/m) dimensions. The redrawn sets are consecutive slices of one
// seeded permutation of [0, D), so L_1 and L_m share only D mod m + D/m
// untouched dimensions and are near-orthogonal.
[[nodiscard]] LevelTable generate_level_table(const EncoderConfig& cfg);
[[nodiscard]] BaseMatrix generate_base_matrix(const EncoderConfig& cfg);

[[nodiscard]] std::vector<std::uint32_t> quantize_features(std::span<const double> features,
                                                           const FeatureQuantizer& fq);

// Pre-ADC per-dimension sums for already-binned features.
[[nodiscard]] std::vector<std::int32_t> accumulate(
    std::span<const std::uint32_t> level_indices, const LevelTable& levels, const BaseMatrix& bases,
    CodeInterpretation arithmetic = CodeInterpretation::unsigned_codes);

[[nodiscard]] std::vector<std::int32_t> raw_sums(
    std::span<const double> features, const FeatureQuantizer& fq, const LevelTable& levels, const BaseMatrix& bases,
    CodeInterpretation arithmetic = CodeInterpretation::unsigned_codes);

[[nodiscard]] Hypervector adc_requantize(std::span<const std::int32_t> sums, Precision precision, AdcRange adc);

[[nodiscard]] Hypervector encode(std::span<const double> features, const FeatureQuantizer& fq,
                                 const LevelTable& levels, const BaseMatrix& bases, const EncoderConfig& cfg);

// Linear-interpolated percentiles (numpy "linear" rule) of a sample.
[[nodiscard]] std::pair<double, double> percentile_range(std::vector<double> values, double lo_pct, double hi_pct);

inline constexpr std::size_t kDefaultCalibrationSamples = 512;

// 1st/99th percentile of S_d over (a seeded subsample of) the training rows.
// A degenerate sample is widened by +-0.5 so the range stays usable.
[[nodiscard]] AdcRange calibrate_adc(FeatureRows training, const FeatureQuantizer& fq, const LevelTable& levels,
                                     const BaseMatrix& bases, const EncoderConfig& cfg,
                                     std::size_t max_samples = kDefaultCalibrationSamples);

// Owns the complete encoder state that is persisted in a model bundle.
class Encoder {
 public:
  // Generates level and base tables from cfg.seed.
  Encoder(EncoderConfig cfg, FeatureQuantizer fq);
  Encoder(EncoderConfig cfg, FeatureQuantizer fq, LevelTable levels, BaseMatrix bases);

  [[nodiscard]] const EncoderConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const FeatureQuantizer& quantizer() const noexcept { return fq_; }
  [[nodiscard]] const LevelTable& levels() const noexcept { return levels_; }
  [[nodiscard]] const BaseMatrix& bases() const noexcept { return bases_; }

  void calibrate(FeatureRows training, std::size_t max_samples = kDefaultCalibrationSamples);
  void set_adc(AdcRange adc) { cfg_.adc = adc; }

  [[nodiscard]] std::vector<std::int32_t> raw_sums(std::span<const double> features) const;
  [[nodiscard]] Hypervector encode(std::span<const double> features) const;
  // Parallel across rows; output order matches input order.
  [[nodiscard]] std::vector<Hypervector> encode_all(FeatureRows rows) const;

 private:
  void check_shapes() const;

  EncoderConfig cfg_;
  FeatureQuantizer fq_;
  LevelTable levels_;
  BaseMatrix bases_;
};

}  // namespace mimhd
