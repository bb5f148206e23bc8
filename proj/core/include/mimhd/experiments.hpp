#pragma once

// Experiment drivers behind the CLI: dimensionality/precision/metric sweeps,
// cosine-vs-MCAM comparison with and without HWART, and noise robustness.
//
// Result files are one header line plus one comma-separated row per result,
// appended and flushed as each combination finishes. Wall-clock time goes to
// `<output>.timing.csv` and the full configuration to `<output>.meta.json`,
// so the result rows themselves are byte-identical across repeated runs.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "mimhd/config.hpp"
#include "mimhd/datasets.hpp"
#include "mimhd/encoder.hpp"
#include "mimhd/hardware.hpp"
#include "mimhd/similarity.hpp"
#include "mimhd/trainer.hpp"

namespace mimhd {

struct ExperimentConfig {
  DatasetSource dataset;
  std::vector<std::size_t> dims{4000};
  std::vector<int> precisions{2};
  std::vector<Metric> metrics{Metric::mcam};
  RngSeed seed;
  int levels = EncoderConfig::kDefaultLevels;
  std::optional<int> base_precision;
  CodeInterpretation arithmetic = CodeInterpretation::zero_centered;
  bool retrain = true;
  HwartConfig hwart;
  double mcam_beta = McamKernel::kDefaultBeta;
  double mcam_gmax = McamKernel::kDefaultGMax;
  std::optional<NoiseSpec> noise;
  std::filesystem::path output;

  // Throws invalid-config on empty sweep lists or invalid parameters.
  void validate() const;
  // Sorted, de-duplicated sweep axes.
  [[nodiscard]] ExperimentConfig canonical() const;
};

struct EncodedSplits {
  Encoder encoder;
  std::vector<LabeledHv> train;
  std::vector<LabeledHv> test;
  std::vector<int> classes;
};

// Encodes every row with an existing (for example, loaded) encoder.
[[nodiscard]] std::vector<LabeledHv> encode_dataset(const Encoder& encoder, const Dataset& ds);

// Train-split bounds, seeded tables, ADC calibration on the training split,
// then encoding of both splits.
[[nodiscard]] EncodedSplits encode_splits(const DatasetPair& data, const EncoderConfig& base);

[[nodiscard]] EncoderConfig encoder_config(const ExperimentConfig& cfg, std::size_t dim, int precision,
                                           std::size_t features);

struct ResultRow {
  std::string dataset;
  std::size_t dim = 0;
  int precision = 0;
  Metric metric = Metric::mcam;
  bool retrained = false;
  double accuracy = 0.0;
  double train_accuracy = 0.0;
  std::size_t epochs = 0;
  std::string stop_reason;  // "stabilized", "max-epochs" or "none"
  std::size_t crossbar_arrays = 0;
  std::size_t mcam_arrays = 0;
  std::size_t adc_conversions = 0;
  std::optional<double> noise_rate;
  std::optional<double> noisy_accuracy;
  double wall_seconds = 0.0;  // written to the timing sidecar only

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

[[nodiscard]] std::string result_header();
[[nodiscard]] std::string format_row(const ResultRow& row);
[[nodiscard]] ResultRow parse_row(const std::string& line);
[[nodiscard]] std::vector<ResultRow> read_results(const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

class ResultWriter {
 public:
  // Truncates `path` and writes the header plus the metadata sidecar.
  ResultWriter(std::filesystem::path path, const std::string& metadata_json);
  void append(const ResultRow& row);

 private:
  std::filesystem::path path_;
  std::ofstream rows_;
  std::ofstream timing_;
};

[[nodiscard]] std::string metadata_json(const ExperimentConfig& cfg, const std::string& command);

// Fails fast (io error) before any training if dataset files are missing.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const DatasetPair& data);

struct MetricComparison {
  std::size_t dim = 0;
  int precision = 0;
  double cosine_cosine = 0.0;   // (a) single-pass, cosine search
  double cosine_mcam = 0.0;     // (b) single-pass, MCAM search
  double cosine_hamming = 0.0;  // single-pass, Hamming search
  double hwart_mcam = 0.0;      // (c) HWART-retrained, MCAM search
  std::size_t hwart_epochs = 0;

  [[nodiscard]] double loss_without_hwart() const noexcept { return cosine_cosine - cosine_mcam; }
  [[nodiscard]] double loss_with_hwart() const noexcept { return cosine_cosine - hwart_mcam; }
};

// Uses the first entry of dims and precisions.
[[nodiscard]] MetricComparison compare_metrics(const ExperimentConfig& cfg);
[[nodiscard]] MetricComparison compare_metrics(const ExperimentConfig& cfg, const DatasetPair& data);

struct RobustnessResult {
  std::string dataset;
  std::size_t dim = 0;
  int precision = 0;
  Metric metric = Metric::mcam;
  bool retrained = false;
  RobustnessRow row;
};

// Trains one model per (D, P, metric) and sweeps the flip rates.
[[nodiscard]] std::vector<RobustnessResult> run_robustness(const ExperimentConfig& cfg, const DatasetPair& data,
                                                           const std::vector<double>& rates, std::size_t trials);
[[nodiscard]] std::string robustness_header();
[[nodiscard]] std::string format_robustness(const RobustnessResult& r);

// Builds an ExperimentConfig from key/value entries (same names as the CLI
// long flags: dim, precision, metric, seed, levels, base-precision,
// arithmetic, eta,
// batch-size, max-epochs, patience, stability-epsilon, mcam-beta, mcam-gmax,
// retrain, dataset, data-dir, output, noise-rate, noise-targets).
[[nodiscard]] ExperimentConfig experiment_from_config(const KeyValueConfig& kv);

}  // namespace mimhd
