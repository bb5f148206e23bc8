#pragma once

// Single-pass class-HV bundling and hardware-aware retraining (HWART).
//
// HWART keeps two copies of the model. Predictions come from the P-bit copy
// under the deployment metric; on a miss (true l, predicted l') the real copy
// moves by
//   C_l  += eta (delta_l' - delta_l) H
//   C_l' -= eta (delta_l' - delta_l) H
// and every batch_size samples the P-bit copy is re-derived from the real one.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mimhd/hypervector.hpp"
#include "mimhd/similarity.hpp"

namespace mimhd {

struct LabeledHv {
  Hypervector hv;
  int label = 0;
};

class Model {
 public:
  // Quantized copy is derived immediately (sync).
  Model(std::vector<int> labels, std::vector<RealHypervector> real_classes, Precision precision);
  // Restores a persisted model (or a noisy deployment copy): shapes and
  // precision are checked, the P-bit copy is taken as given.
  Model(std::vector<int> labels, std::vector<RealHypervector> real_classes, std::vector<Hypervector> quant_classes,
        Precision precision, double lo, double hi);

  [[nodiscard]] std::size_t classes() const noexcept { return labels_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return real_.front().dim(); }
  [[nodiscard]] Precision precision() const noexcept { return precision_; }
  [[nodiscard]] std::span<const int> labels() const noexcept { return labels_; }
  [[nodiscard]] std::span<const RealHypervector> real_classes() const noexcept { return real_; }
  [[nodiscard]] std::span<const Hypervector> quant_classes() const noexcept { return quant_; }
  [[nodiscard]] double range_lo() const noexcept { return lo_; }
  [[nodiscard]] double range_hi() const noexcept { return hi_; }

  // Throws invalid-label for a label the model does not hold.
  [[nodiscard]] std::size_t index_of(int label) const;

  // Re-derives the P-bit copy with range = global min/max of the real copy.
  // An all-equal real copy uses [v, v + 1] so the map stays defined.
  void sync();

  // Retraining update between rows `true_index` and `predicted_index`; does not sync.
  void apply_update(std::size_t true_index, std::size_t predicted_index, const Hypervector& query, double eta,
                    double similarity_gap);

  // Returns a copy whose P-bit classes are replaced (noise injection);
  // the real copy is untouched.
  [[nodiscard]] Model with_quant_classes(std::vector<Hypervector> quant) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  std::vector<int> labels_;
  std::vector<RealHypervector> real_;
  std::vector<Hypervector> quant_;
  Precision precision_;
  double lo_ = 0.0;
  double hi_ = 1.0;
};

[[nodiscard]] Prediction classify(const Hypervector& q, const Model& model, Metric metric,
                                  const McamKernel* kernel = nullptr);

// Class set defaults to the distinct labels in `encoded`, ascending. A label
// listed in `class_labels` without samples gets an all-zero class HV and a
// warning.
[[nodiscard]] Model train_single_pass(std::span<const LabeledHv> encoded,
                                      std::optional<std::vector<int>> class_labels = std::nullopt);

struct HwartConfig {
  double eta = 0.05;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 50;
  std::size_t patience = 3;
  double stability_epsilon = 0.001;
  RngSeed seed;

  void validate() const;
};

enum class StopReason { stabilized, max_epochs };
std::string_view to_string(StopReason reason) noexcept;

struct TrainReport {
  double initial_accuracy = 0.0;  // synced model before the first epoch
  std::vector<double> epoch_accuracy;
  std::size_t epochs = 0;
  StopReason stop_reason = StopReason::max_epochs;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

struct StepOutcome {
  bool updated = false;
  int predicted_label = 0;
  double similarity_gap = 0.0;  // delta_l' - delta_l, 0 when correct
};

[[nodiscard]] StepOutcome hwart_step(Model& model, const Hypervector& q, int true_label, const HwartConfig& cfg,
                                     Metric metric, const McamKernel* kernel);

// Epoch = seeded shuffle, one hwart_step per sample, sync every batch_size
// samples and at epoch end, then training accuracy of the synced model.
// Stops once |acc_e - acc_{e-1}| < stability_epsilon for `patience`
// consecutive epochs, or at max_epochs.
[[nodiscard]] TrainReport hwart_train(Model& model, std::span<const LabeledHv> training, const HwartConfig& cfg,
                                      Metric metric, const McamKernel* kernel);

// Throws invalid-input on an empty set. Parallel across samples.
[[nodiscard]] double evaluate(const Model& model, std::span<const LabeledHv> test, Metric metric,
                              const McamKernel* kernel = nullptr);

}  // namespace mimhd
