#include "mimhd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "mimhd/error.hpp"
#include "mimhd/parallel.hpp"

namespace mimhd {

Model::Model(std::vector<int> labels, std::vector<RealHypervector> real_classes, Precision precision)
    : labels_(std::move(labels)), real_(std::move(real_classes)), precision_(precision) {
  if (labels_.empty()) throw Error(ErrorKind::invalid_model, "model needs at least one class");
  if (labels_.size() != real_.size()) throw Error(ErrorKind::shape, "label count differs from class count");
  for (const auto& c : real_) {
    if (c.dim() != real_.front().dim()) throw Error(ErrorKind::shape, "class hypervectors differ in dimension");
  }
  sync();
}

Model::Model(std::vector<int> labels, std::vector<RealHypervector> real_classes,
             std::vector<Hypervector> quant_classes, Precision precision, double lo, double hi)
    : labels_(std::move(labels)),
      real_(std::move(real_classes)),
      quant_(std::move(quant_classes)),
      precision_(precision),
      lo_(lo),
      hi_(hi) {
  if (labels_.empty()) throw Error(ErrorKind::invalid_model, "model needs at least one class");
  if (!(lo_ < hi_)) throw Error(ErrorKind::invalid_range, "model quantization range must satisfy lo < hi");
  if (labels_.size() != real_.size() || real_.size() != quant_.size()) {
    throw Error(ErrorKind::shape, "model copies have different class counts");
  }
  for (std::size_t i = 0; i < real_.size(); ++i) {
    if (real_[i].dim() != real_.front().dim() || quant_[i].dim() != real_.front().dim()) {
      throw Error(ErrorKind::shape, "model copies differ in dimension");
    }
    if (quant_[i].precision() != precision_) throw Error(ErrorKind::shape, "quantized class has wrong precision");
  }
}

std::size_t Model::index_of(int label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorKind::invalid_label, "label " + std::to_string(label) + " is not in the model");
  return static_cast<std::size_t>(it - labels_.begin());
}

void Model::sync() {
  double lo = real_.front()[0];
  double hi = lo;
  for (const auto& c : real_) {
    const auto [mn, mx] = std::minmax_element(c.components().begin(), c.components().end());
    lo = std::min(lo, *mn);
    hi = std::max(hi, *mx);
  }
  if (!(lo < hi)) hi = lo + 1.0;
  lo_ = lo;
  hi_ = hi;
  quant_.clear();
  quant_.reserve(real_.size());
  for (const auto& c : real_) quant_.push_back(quantize_hv(c, precision_, lo_, hi_));
}

void Model::apply_update(std::size_t true_index, std::size_t predicted_index, const Hypervector& query, double eta,
                         double similarity_gap) {
  if (true_index >= real_.size() || predicted_index >= real_.size()) {
    throw Error(ErrorKind::invalid_label, "class index out of range");
  }
  if (query.dim() != dim()) throw Error(ErrorKind::shape, "query dimension differs from model");
  const double step = eta * similarity_gap;
  real_[true_index].add_scaled(query, step);
  real_[predicted_index].add_scaled(query, -step);
}

Model Model::with_quant_classes(std::vector<Hypervector> quant) const {
  return Model(labels_, real_, std::move(quant), precision_, lo_, hi_);
}

Prediction classify(const Hypervector& q, const Model& model, Metric metric, const McamKernel* kernel) {
  if (q.precision() != model.precision()) throw Error(ErrorKind::shape, "query precision differs from model");
  Prediction p;
  p.scores = score_all(q, model.quant_classes(), metric, kernel);
  p.index = argbest(p.scores);
  p.label = model.labels()[p.index];
  return p;
}

Model train_single_pass(std::span<const LabeledHv> encoded, std::optional<std::vector<int>> class_labels) {
  if (encoded.empty()) throw Error(ErrorKind::invalid_input, "single-pass training needs samples");
  const std::size_t dim = encoded.front().hv.dim();
  const Precision precision = encoded.front().hv.precision();

  std::vector<int> labels;
  if (class_labels) {
    labels = *class_labels;
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  } else {
    for (const auto& s : encoded) labels.push_back(s.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  }

  std::map<int, std::size_t> slot;
  for (std::size_t i = 0; i < labels.size(); ++i) slot[labels[i]] = i;

  std::vector<RealHypervector> sums(labels.size(), RealHypervector::zeros(dim));
  std::vector<std::size_t> counts(labels.size(), 0);
  for (const auto& s : encoded) {
    if (s.hv.dim() != dim || s.hv.precision() != precision) {
      throw Error(ErrorKind::shape, "training hypervectors differ in shape");
    }
    const auto it = slot.find(s.label);
    if (it == slot.end()) throw Error(ErrorKind::invalid_label, "sample label " + std::to_string(s.label) + " not in class set");
    sums[it->second].add(s.hv);
    ++counts[it->second];
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (counts[i] == 0) warn("class " + std::to_string(labels[i]) + " has no training samples; its class HV is all zeros");
  }
  return Model(std::move(labels), std::move(sums), precision);
}

void HwartConfig::validate() const {
  if (!(eta > 0.0)) throw Error(ErrorKind::invalid_config, "HWART eta must be > 0");
  if (batch_size < 1) throw Error(ErrorKind::invalid_config, "HWART batch size must be >= 1");
  if (patience < 1) throw Error(ErrorKind::invalid_config, "HWART patience must be >= 1");
  if (!(stability_epsilon >= 0.0)) throw Error(ErrorKind::invalid_config, "stability epsilon must be >= 0");
}

std::string_view to_string(StopReason reason) noexcept {
  return reason == StopReason::stabilized ? "stabilized" : "max-epochs";
}

StepOutcome hwart_step(Model& model, const Hypervector& q, int true_label, const HwartConfig& cfg, Metric metric,
                       const McamKernel* kernel) {
  const std::size_t truth = model.index_of(true_label);
  const Prediction p = classify(q, model, metric, kernel);
  StepOutcome out;
  out.predicted_label = p.label;
  if (p.index == truth) return out;
  out.similarity_gap = p.scores[p.index].value - p.scores[truth].value;
  model.apply_update(truth, p.index, q, cfg.eta, out.similarity_gap);
  out.updated = true;
  return out;
}

TrainReport hwart_train(Model& model, std::span<const LabeledHv> training, const HwartConfig& cfg, Metric metric,
                        const McamKernel* kernel) {
  cfg.validate();
  TrainReport report;
  if (cfg.max_epochs == 0) return report;
  if (training.empty()) throw Error(ErrorKind::invalid_input, "HWART needs a nonempty training set");
  for (const auto& s : training) (void)model.index_of(s.label);

  Rng rng(derive_seed(cfg.seed, seed_stream::kShuffle));
  std::vector<std::size_t> order(training.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  report.initial_accuracy = evaluate(model, training, metric, kernel);
  double previous = report.initial_accuracy;
  std::size_t stable = 0;
  while (report.epochs < cfg.max_epochs) {
    rng.shuffle(std::span<std::size_t>(order));
    std::size_t in_batch = 0;
    for (std::size_t i : order) {
      (void)hwart_step(model, training[i].hv, training[i].label, cfg, metric, kernel);
      if (++in_batch == cfg.batch_size) {
        model.sync();
        in_batch = 0;
      }
    }
    if (in_batch != 0) model.sync();

    const double acc = evaluate(model, training, metric, kernel);
    report.epoch_accuracy.push_back(acc);
    ++report.epochs;
    stable = std::abs(acc - previous) < cfg.stability_epsilon ? stable + 1 : 0;
    previous = acc;
    if (stable >= cfg.patience) {
      report.stop_reason = StopReason::stabilized;
      return report;
    }
  }
  report.stop_reason = StopReason::max_epochs;
  return report;
}

double evaluate(const Model& model, std::span<const LabeledHv> test, Metric metric, const McamKernel* kernel) {
  if (test.empty()) throw Error(ErrorKind::invalid_input, "evaluation needs a nonempty test set");
  std::vector<std::uint8_t> hit(test.size(), 0);
  parallel_for(test.size(), [&](std::size_t i) {
    hit[i] = classify(test[i].hv, model, metric, kernel).label == test[i].label ? 1 : 0;
  });
  const auto correct = std::accumulate(hit.begin(), hit.end(), std::size_t{0});
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace mimhd
