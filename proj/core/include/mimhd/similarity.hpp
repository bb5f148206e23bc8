#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mimhd/hypervector.hpp"

namespace mimhd {

enum class Metric { cosine, hamming, mcam };

std::string_view to_string(Metric metric) noexcept;
// Throws invalid-config on an unknown name.
Metric parse_metric(std::string_view name);

// Per-cell MCAM conductance as a function of the stored/query level mismatch:
//   g(d) = g_max * (1 - exp(-beta d)) / (1 - exp(-beta d_max))
// g(0) = 0, g(d_max) = g_max, increasing and concave in d.
class McamKernel {
 public:
  static constexpr double kDefaultBeta = 1.0;
  static constexpr double kDefaultGMax = 1.0;

  McamKernel(double g_max, double beta, int d_max);
  static McamKernel for_precision(Precision precision, double g_max = kDefaultGMax, double beta = kDefaultBeta);

  [[nodiscard]] double g_max() const noexcept { return g_max_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] int d_max() const noexcept { return d_max_; }
  // Precomputed g(0..d_max).
  [[nodiscard]] std::span<const double> table() const noexcept { return table_; }

 private:
  double g_max_;
  double beta_;
  int d_max_;
  std::vector<double> table_;
};

struct SimilarityScore {
  double value = 0.0;
  Metric metric = Metric::cosine;
};

struct Prediction {
  int label = 0;
  std::size_t index = 0;  // position of the winning class in the model
  std::vector<SimilarityScore> scores;
};

// Throws invalid-mismatch for d outside [0, d_max].
[[nodiscard]] double mcam_cell(int d, const McamKernel& kernel);

// Row conductance sum; lower is more similar.
[[nodiscard]] double mcam_distance(const Hypervector& q, const Hypervector& c, const McamKernel& kernel);
// 1 - distance / (D * g_max), in [0, 1].
[[nodiscard]] SimilarityScore mcam_similarity(const Hypervector& q, const Hypervector& c, const McamKernel& kernel);

// Fraction of exactly matching components.
[[nodiscard]] SimilarityScore hamming_similarity(const Hypervector& q, const Hypervector& c);

// Throws undefined-similarity when either vector has zero norm.
[[nodiscard]] SimilarityScore cosine_similarity(std::span<const double> q, std::span<const double> c);
[[nodiscard]] SimilarityScore cosine_similarity(const Hypervector& q, const Hypervector& c);
[[nodiscard]] SimilarityScore cosine_similarity(const RealHypervector& q, const RealHypervector& c);
[[nodiscard]] SimilarityScore cosine_similarity(const Hypervector& q, const RealHypervector& c);

// Scores q against every class HV. For cosine, a zero-norm class or query
// scores 0 instead of throwing so one degenerate row cannot abort a search.
[[nodiscard]] std::vector<SimilarityScore> score_all(const Hypervector& q, std::span<const Hypervector> classes,
                                                     Metric metric, const McamKernel* kernel);

// Argmax over scores, ties to the lowest index.
[[nodiscard]] std::size_t argbest(std::span<const SimilarityScore> scores);

}  // namespace mimhd
