#include "mimhd/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mimhd/error.hpp"
#include "mimhd/parallel.hpp"

namespace mimhd {

FeatureQuantizer::FeatureQuantizer(std::vector<double> lo, std::vector<double> hi, int levels)
    : lo_(std::move(lo)), hi_(std::move(hi)), levels_(levels) {
  if (levels_ < 2) throw Error(ErrorKind::invalid_config, "feature quantizer needs m >= 2 levels");
  if (lo_.size() != hi_.size()) throw Error(ErrorKind::shape, "feature quantizer lo/hi length mismatch");
  if (lo_.empty()) throw Error(ErrorKind::invalid_config, "feature quantizer needs at least one feature");
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (!std::isfinite(lo_[k]) || !std::isfinite(hi_[k]) || lo_[k] > hi_[k]) {
      throw Error(ErrorKind::invalid_range, "feature " + std::to_string(k) + " has invalid bounds");
    }
  }
}

std::uint32_t FeatureQuantizer::level_index(std::size_t feature, double value) const noexcept {
  const double lo = lo_[feature];
  const double hi = hi_[feature];
  if (!(lo < hi)) return 0;
  const double scaled = std::floor(static_cast<double>(levels_) * (value - lo) / (hi - lo));
  if (!(scaled > 0.0)) return 0;
  const auto top = static_cast<double>(levels_ - 1);
  return static_cast<std::uint32_t>(std::min(scaled, top));
}

std::string_view to_string(CodeInterpretation c) noexcept {
  return c == CodeInterpretation::zero_centered ? "centered" : "unsigned";
}

CodeInterpretation parse_code_interpretation(std::string_view name) {
  if (name == "unsigned") return CodeInterpretation::unsigned_codes;
  if (name == "centered") return CodeInterpretation::zero_centered;
  throw Error(ErrorKind::invalid_config, "unknown crossbar arithmetic '" + std::string(name) + "'");
}

void EncoderConfig::validate() const {
  if (dim == 0) throw Error(ErrorKind::invalid_dimension, "encoder dimension must be >= 1");
  if (levels < 2) throw Error(ErrorKind::invalid_config, "level count m must be >= 2");
  if (dim < static_cast<std::size_t>(levels)) {
    throw Error(ErrorKind::invalid_config,
                "dimension D=" + std::to_string(dim) + " is smaller than level count m=" + std::to_string(levels));
  }
  if (features == 0) throw Error(ErrorKind::invalid_config, "feature count n must be >= 1");
}

LevelTable::LevelTable(std::vector<Hypervector> levels) : levels_(std::move(levels)) {
  if (levels_.size() < 2) throw Error(ErrorKind::invalid_config, "level table needs >= 2 rows");
  for (const auto& l : levels_) {
    if (l.dim() != levels_.front().dim() || l.precision() != levels_.front().precision()) {
      throw Error(ErrorKind::shape, "level table rows differ in dimension or precision");
    }
  }
}

BaseMatrix::BaseMatrix(std::vector<Hypervector> bases) : bases_(std::move(bases)) {
  if (bases_.empty()) throw Error(ErrorKind::invalid_config, "base matrix needs >= 1 row");
  for (const auto& b : bases_) {
    if (b.dim() != bases_.front().dim() || b.precision() != bases_.front().precision()) {
      throw Error(ErrorKind::shape, "base matrix rows differ in dimension or precision");
    }
  }
}

LevelTable generate_level_table(const EncoderConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, seed_stream::kLevels));
  const auto m = static_cast<std::size_t>(cfg.levels);
  const std::size_t per_step = cfg.dim / m;

  std::vector<std::size_t> order(cfg.dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<Hypervector> levels;
  levels.reserve(m);
  levels.push_back(random_hv(cfg.dim, cfg.precision, rng));
  std::vector<std::uint8_t> current(levels.front().components().begin(), levels.front().components().end());
  for (std::size_t j = 1; j < m; ++j) {
    const std::size_t begin = (j - 1) * per_step;
    for (std::size_t t = begin; t < begin + per_step; ++t) current[order[t]] = rng.code(cfg.precision.bits());
    levels.emplace_back(cfg.precision, current);
  }
  return LevelTable(std::move(levels));
}

BaseMatrix generate_base_matrix(const EncoderConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, seed_stream::kBases));
  std::vector<Hypervector> bases;
  bases.reserve(cfg.features);
  for (std::size_t k = 0; k < cfg.features; ++k) bases.push_back(random_hv(cfg.dim, cfg.effective_base_precision(), rng));
  return BaseMatrix(std::move(bases));
}

std::vector<std::uint32_t> quantize_features(std::span<const double> features, const FeatureQuantizer& fq) {
  if (features.size() != fq.features()) {
    throw Error(ErrorKind::shape, "feature vector has " + std::to_string(features.size()) + " values, expected " +
                                      std::to_string(fq.features()));
  }
  std::vector<std::uint32_t> idx(features.size());
  for (std::size_t k = 0; k < features.size(); ++k) idx[k] = fq.level_index(k, features[k]);
  return idx;
}

std::vector<std::int32_t> accumulate(std::span<const std::uint32_t> level_indices, const LevelTable& levels,
                                     const BaseMatrix& bases, CodeInterpretation arithmetic) {
  if (level_indices.size() != bases.size()) throw Error(ErrorKind::shape, "feature count differs from base matrix rows");
  if (levels.dim() != bases.dim()) throw Error(ErrorKind::shape, "level and base dimensions differ");
  const std::size_t dim = levels.dim();
  std::vector<std::int32_t> sums(dim, 0);
  std::int32_t* out = sums.data();
  const bool centered = arithmetic == CodeInterpretation::zero_centered;
  const int level_offset = centered ? levels.precision().max_code() : 0;
  const int base_offset = centered ? bases.precision().max_code() : 0;
  const int scale = centered ? 2 : 1;
  for (std::size_t k = 0; k < level_indices.size(); ++k) {
    if (level_indices[k] >= levels.size()) throw Error(ErrorKind::shape, "level index out of range");
    const std::uint8_t* l = levels[level_indices[k]].components().data();
    const std::uint8_t* b = bases[k].components().data();
    if (centered) {
      for (std::size_t d = 0; d < dim; ++d) {
        out[d] += (scale * l[d] - level_offset) * (scale * b[d] - base_offset);
      }
    } else {
      for (std::size_t d = 0; d < dim; ++d) out[d] += static_cast<std::int32_t>(l[d] * b[d]);
    }
  }
  return sums;
}

std::vector<std::int32_t> raw_sums(std::span<const double> features, const FeatureQuantizer& fq,
                                   const LevelTable& levels, const BaseMatrix& bases, CodeInterpretation arithmetic) {
  return accumulate(quantize_features(features, fq), levels, bases, arithmetic);
}

Hypervector adc_requantize(std::span<const std::int32_t> sums, Precision precision, AdcRange adc) {
  if (!adc.calibrated()) {
    throw Error(ErrorKind::invalid_config, "ADC range is uncalibrated (adc_lo must be < adc_hi)");
  }
  std::vector<std::uint8_t> codes(sums.size());
  for (std::size_t d = 0; d < sums.size(); ++d) {
    codes[d] = quantize_value(static_cast<double>(sums[d]), precision, adc.lo, adc.hi);
  }
  return Hypervector(precision, std::move(codes));
}

Hypervector encode(std::span<const double> features, const FeatureQuantizer& fq, const LevelTable& levels,
                   const BaseMatrix& bases, const EncoderConfig& cfg) {
  if (levels.dim() != cfg.dim || bases.dim() != cfg.dim || bases.size() != cfg.features) {
    throw Error(ErrorKind::shape, "encoder tables do not match the configuration");
  }
  if (!cfg.adc.calibrated()) {
    throw Error(ErrorKind::invalid_config, "ADC range is uncalibrated (adc_lo must be < adc_hi)");
  }
  const auto sums = raw_sums(features, fq, levels, bases, cfg.arithmetic);
  return adc_requantize(sums, cfg.precision, cfg.adc);
}

std::pair<double, double> percentile_range(std::vector<double> values, double lo_pct, double hi_pct) {
  if (values.empty()) throw Error(ErrorKind::invalid_input, "percentile of an empty sample");
  if (!(0.0 <= lo_pct && lo_pct <= hi_pct && hi_pct <= 100.0)) {
    throw Error(ErrorKind::invalid_range, "percentiles must satisfy 0 <= lo <= hi <= 100");
  }
  auto at = [&values](double pct) {
    const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
    const auto below = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(below);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(below), values.end());
    const double a = values[below];
    if (frac == 0.0 || below + 1 >= values.size()) return a;
    const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(below) + 1, values.end());
    return a + frac * (b - a);
  };
  const double lo = at(lo_pct);
  const double hi = at(hi_pct);
  return {lo, hi};
}

AdcRange calibrate_adc(FeatureRows training, const FeatureQuantizer& fq, const LevelTable& levels,
                       const BaseMatrix& bases, const EncoderConfig& cfg, std::size_t max_samples) {
  const std::size_t rows = training.rows();
  if (rows == 0) throw Error(ErrorKind::invalid_input, "ADC calibration needs a nonempty training set");
  if (max_samples == 0) max_samples = rows;

  std::vector<std::size_t> picks(rows);
  std::iota(picks.begin(), picks.end(), std::size_t{0});
  if (rows > max_samples) {
    Rng rng(derive_seed(cfg.seed, seed_stream::kAdcSample));
    rng.shuffle(std::span<std::size_t>(picks));
    picks.resize(max_samples);
    std::sort(picks.begin(), picks.end());
  }

  const std::size_t dim = levels.dim();
  std::vector<double> sample(picks.size() * dim);
  parallel_for(picks.size(), [&](std::size_t i) {
    const auto sums = raw_sums(training.row(picks[i]), fq, levels, bases, cfg.arithmetic);
    std::copy(sums.begin(), sums.end(), sample.begin() + static_cast<std::ptrdiff_t>(i * dim));
  });
  auto [lo, hi] = percentile_range(std::move(sample), 1.0, 99.0);
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  return AdcRange{lo, hi};
}

Encoder::Encoder(EncoderConfig cfg, FeatureQuantizer fq)
    : cfg_(cfg), fq_(std::move(fq)), levels_(generate_level_table(cfg)), bases_(generate_base_matrix(cfg)) {
  check_shapes();
}

Encoder::Encoder(EncoderConfig cfg, FeatureQuantizer fq, LevelTable levels, BaseMatrix bases)
    : cfg_(cfg), fq_(std::move(fq)), levels_(std::move(levels)), bases_(std::move(bases)) {
  cfg_.validate();
  check_shapes();
}

void Encoder::check_shapes() const {
  if (fq_.features() != cfg_.features || bases_.size() != cfg_.features) {
    throw Error(ErrorKind::shape, "feature count disagrees between config, quantizer and base matrix");
  }
  if (fq_.levels() != cfg_.levels || levels_.size() != static_cast<std::size_t>(cfg_.levels)) {
    throw Error(ErrorKind::shape, "level count disagrees between config, quantizer and level table");
  }
  if (levels_.dim() != cfg_.dim || bases_.dim() != cfg_.dim) {
    throw Error(ErrorKind::shape, "table dimension disagrees with config");
  }
  if (levels_.precision() != cfg_.precision || bases_.precision() != cfg_.effective_base_precision()) {
    throw Error(ErrorKind::shape, "table precision disagrees with config");
  }
}

void Encoder::calibrate(FeatureRows training, std::size_t max_samples) {
  cfg_.adc = calibrate_adc(training, fq_, levels_, bases_, cfg_, max_samples);
}

std::vector<std::int32_t> Encoder::raw_sums(std::span<const double> features) const {
  return mimhd::raw_sums(features, fq_, levels_, bases_, cfg_.arithmetic);
}

Hypervector Encoder::encode(std::span<const double> features) const {
  return mimhd::encode(features, fq_, levels_, bases_, cfg_);
}

std::vector<Hypervector> Encoder::encode_all(FeatureRows rows) const {
  if (rows.cols != cfg_.features) throw Error(ErrorKind::shape, "feature rows have the wrong width");
  if (!cfg_.adc.calibrated()) throw Error(ErrorKind::invalid_config, "ADC range is uncalibrated");
  std::vector<std::optional<Hypervector>> slots(rows.rows());
  parallel_for(rows.rows(), [&](std::size_t i) { slots[i].emplace(encode(rows.row(i))); });
  std::vector<Hypervector> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace mimhd
