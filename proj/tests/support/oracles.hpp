#pragma once

// Reference computations written independently of the library code paths
// they check: plain loops over std::vector, closed forms evaluated with
// std::exp, no shared helpers with core/.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mimhd::oracle {

struct EncodeInstance {
  std::vector<double> features;
  std::vector<double> lo, hi;
  int levels = 0;
  std::vector<std::vector<int>> level_rows;  // levels x D
  std::vector<std::vector<int>> base_rows;   // n x D
  int precision_bits = 1;
  int base_bits = 1;
  bool centered = false;
  double adc_lo = 0.0, adc_hi = 1.0;
};

inline int level_of(double v, double lo, double hi, int m) {
  if (!(lo < hi)) return 0;
  const double t = (v - lo) / (hi - lo) * m;
  int idx = static_cast<int>(std::floor(t));
  if (t < 0) idx = 0;
  if (idx > m - 1) idx = m - 1;
  if (idx < 0) idx = 0;
  return idx;
}

inline std::vector<long long> naive_sums(const EncodeInstance& in) {
  const std::size_t dim = in.level_rows.front().size();
  const int lmax = (1 << in.precision_bits) - 1;
  const int bmax = (1 << in.base_bits) - 1;
  std::vector<long long> sums(dim, 0);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t k = 0; k < in.features.size(); ++k) {
      const int row = level_of(in.features[k], in.lo[k], in.hi[k], in.levels);
      long long l = in.level_rows[static_cast<std::size_t>(row)][d];
      long long b = in.base_rows[k][d];
      if (in.centered) {
        l = 2 * l - lmax;
        b = 2 * b - bmax;
      }
      sums[d] += l * b;
    }
  }
  return sums;
}

// Nearest code with halves rounded up, saturating at both ends. The scaled
// position is formed as ((s - lo) / (hi - lo)) * max, the order the
// quantizer definition states, so exact ties resolve identically.
inline int naive_code(double s, double lo, double hi, int bits) {
  const int max = (1 << bits) - 1;
  const double x = ((s - lo) / (hi - lo)) * max;
  int best = 0;
  for (int c = 0; c <= max; ++c) {
    if (x >= c - 0.5) best = c;
  }
  return best;
}

inline std::vector<int> naive_encode(const EncodeInstance& in) {
  std::vector<int> out;
  for (long long s : naive_sums(in)) out.push_back(naive_code(static_cast<double>(s), in.adc_lo, in.adc_hi, in.precision_bits));
  return out;
}

inline double mcam_g(int d, double g_max, double beta, int d_max) {
  return g_max * (1.0 - std::exp(-beta * d)) / (1.0 - std::exp(-beta * d_max));
}

inline double mcam_similarity(const std::vector<int>& q, const std::vector<int>& c, double g_max, double beta,
                              int d_max) {
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) total += mcam_g(std::abs(q[i] - c[i]), g_max, beta, d_max);
  return 1.0 - total / (static_cast<double>(q.size()) * g_max);
}

inline double hamming_similarity(const std::vector<int>& q, const std::vector<int>& c) {
  int same = 0;
  for (std::size_t i = 0; i < q.size(); ++i) same += q[i] == c[i];
  return static_cast<double>(same) / static_cast<double>(q.size());
}

inline double cosine(const std::vector<int>& q, const std::vector<int>& c) {
  double dot = 0, a = 0, b = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    dot += q[i] * c[i];
    a += q[i] * q[i];
    b += c[i] * c[i];
  }
  if (a == 0 || b == 0) return 0.0;
  return dot / std::sqrt(a * b);
}

// Index of the largest score, first one on ties.
inline std::size_t first_argmax(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

// Retraining update applied to plain vectors.
inline void hwart_update(std::vector<std::vector<double>>& classes, std::size_t truth, std::size_t predicted,
                         const std::vector<int>& query, double eta, double delta_pred, double delta_true) {
  for (std::size_t d = 0; d < query.size(); ++d) {
    classes[truth][d] = classes[truth][d] + eta * (delta_pred - delta_true) * query[d];
    classes[predicted][d] = classes[predicted][d] - eta * (delta_pred - delta_true) * query[d];
  }
}

// Tile counts by walking the 64-wide column slices and 64-row class blocks.
struct Tiles {
  std::size_t crossbar = 0;
  std::size_t mcam = 0;
};

inline Tiles count_tiles(std::size_t n, std::size_t dim, std::size_t k) {
  std::size_t column_slices = 0;
  for (std::size_t start = 0; start < dim; start += 64) ++column_slices;
  std::size_t row_blocks = 0;
  for (std::size_t start = 0; start < k; start += 64) ++row_blocks;
  Tiles t;
  for (std::size_t f = 0; f < n; ++f) t.crossbar += column_slices;
  t.mcam = column_slices * row_blocks;
  return t;
}

}  // namespace mimhd::oracle
