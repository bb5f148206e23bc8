#include "mimhd/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimhd/error.hpp"

namespace mimhd {

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::cosine: return "cosine";
    case Metric::hamming: return "hamming";
    case Metric::mcam: return "mcam";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::cosine;
  if (name == "hamming") return Metric::hamming;
  if (name == "mcam") return Metric::mcam;
  throw Error(ErrorKind::invalid_config, "unknown metric '" + std::string(name) + "'");
}

McamKernel::McamKernel(double g_max, double beta, int d_max) : g_max_(g_max), beta_(beta), d_max_(d_max) {
  if (!(g_max > 0.0) || !std::isfinite(g_max)) throw Error(ErrorKind::invalid_config, "MCAM g_max must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::invalid_config, "MCAM beta must be positive");
  if (d_max < 1) throw Error(ErrorKind::invalid_config, "MCAM d_max must be >= 1");
  const double norm = -std::expm1(-beta * d_max);
  table_.resize(static_cast<std::size_t>(d_max) + 1);
  for (int d = 0; d <= d_max; ++d) table_[static_cast<std::size_t>(d)] = g_max * (-std::expm1(-beta * d)) / norm;
  table_.back() = g_max;
}

McamKernel McamKernel::for_precision(Precision precision, double g_max, double beta) {
  return McamKernel(g_max, beta, precision.max_code());
}

double mcam_cell(int d, const McamKernel& kernel) {
  if (d < 0 || d > kernel.d_max()) {
    throw Error(ErrorKind::invalid_mismatch,
                "mismatch " + std::to_string(d) + " outside [0, " + std::to_string(kernel.d_max()) + "]");
  }
  return kernel.table()[static_cast<std::size_t>(d)];
}

namespace {

void require_same_shape(const Hypervector& q, const Hypervector& c) {
  if (q.dim() != c.dim()) {
    throw Error(ErrorKind::shape, "dimension mismatch: " + std::to_string(q.dim()) + " vs " + std::to_string(c.dim()));
  }
}

void require_kernel_fits(const Hypervector& q, const McamKernel& kernel) {
  if (kernel.d_max() < q.precision().max_code()) {
    throw Error(ErrorKind::invalid_config, "MCAM kernel d_max is smaller than 2^P - 1");
  }
}

double mcam_distance_unchecked(const Hypervector& q, const Hypervector& c, std::span<const double> table) {
  const auto a = q.components();
  const auto b = c.components();
  double total = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const int diff = a[d] > b[d] ? a[d] - b[d] : b[d] - a[d];
    total += table[static_cast<std::size_t>(diff)];
  }
  return total;
}

double hamming_unchecked(const Hypervector& q, const Hypervector& c) {
  const auto a = q.components();
  const auto b = c.components();
  std::size_t equal = 0;
  for (std::size_t d = 0; d < a.size(); ++d) equal += a[d] == b[d] ? 1U : 0U;
  return static_cast<double>(equal) / static_cast<double>(a.size());
}

template <typename A, typename B>
double cosine_raw(std::span<const A> a, std::span<const B> b, bool& degenerate) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]);
    const double y = static_cast<double>(b[i]);
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  degenerate = na == 0.0 || nb == 0.0;
  if (degenerate) return 0.0;
  const double v = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(v, -1.0, 1.0);
}

template <typename A, typename B>
SimilarityScore cosine_checked(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::shape, "dimension mismatch in cosine similarity");
  bool degenerate = false;
  const double v = cosine_raw(a, b, degenerate);
  if (degenerate) throw Error(ErrorKind::undefined_similarity, "cosine similarity with a zero vector");
  return {v, Metric::cosine};
}

}  // namespace

double mcam_distance(const Hypervector& q, const Hypervector& c, const McamKernel& kernel) {
  require_same_shape(q, c);
  require_kernel_fits(q, kernel);
  require_kernel_fits(c, kernel);
  return mcam_distance_unchecked(q, c, kernel.table());
}

SimilarityScore mcam_similarity(const Hypervector& q, const Hypervector& c, const McamKernel& kernel) {
  const double distance = mcam_distance(q, c, kernel);
  return {1.0 - distance / (static_cast<double>(q.dim()) * kernel.g_max()), Metric::mcam};
}

SimilarityScore hamming_similarity(const Hypervector& q, const Hypervector& c) {
  require_same_shape(q, c);
  return {hamming_unchecked(q, c), Metric::hamming};
}

SimilarityScore cosine_similarity(std::span<const double> q, std::span<const double> c) { return cosine_checked(q, c); }

SimilarityScore cosine_similarity(const Hypervector& q, const Hypervector& c) {
  return cosine_checked(q.components(), c.components());
}

SimilarityScore cosine_similarity(const RealHypervector& q, const RealHypervector& c) {
  return cosine_checked(q.components(), c.components());
}

SimilarityScore cosine_similarity(const Hypervector& q, const RealHypervector& c) {
  return cosine_checked(q.components(), c.components());
}

std::vector<SimilarityScore> score_all(const Hypervector& q, std::span<const Hypervector> classes, Metric metric,
                                       const McamKernel* kernel) {
  if (classes.empty()) throw Error(ErrorKind::invalid_model, "model has no class hypervectors");
  if (metric == Metric::mcam) {
    if (kernel == nullptr) throw Error(ErrorKind::invalid_config, "MCAM metric requires a kernel");
    require_kernel_fits(q, *kernel);
  }
  std::vector<SimilarityScore> scores;
  scores.reserve(classes.size());
  for (const auto& c : classes) {
    require_same_shape(q, c);
    switch (metric) {
      case Metric::mcam: {
        const double distance = mcam_distance_unchecked(q, c, kernel->table());
        scores.push_back({1.0 - distance / (static_cast<double>(q.dim()) * kernel->g_max()), metric});
        break;
      }
      case Metric::hamming:
        scores.push_back({hamming_unchecked(q, c), metric});
        break;
      case Metric::cosine: {
        bool degenerate = false;
        scores.push_back({cosine_raw(q.components(), c.components(), degenerate), metric});
        break;
      }
    }
  }
  return scores;
}

std::size_t argbest(std::span<const SimilarityScore> scores) {
  if (scores.empty()) throw Error(ErrorKind::invalid_model, "no scores to rank");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].value > scores[best].value) best = i;
  }
  return best;
}

}  // namespace mimhd
