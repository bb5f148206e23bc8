#pragma once

// Dense multi-bit hypervectors, the affine P-bit quantizer shared by the ADC
// model and the trainer, and the project-wide seeded random source.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace mimhd {

// Bits per hypervector component. Only 1, 2 and 3 are representable in the
// multi-level cells being modeled.
class Precision {
 public:
  static constexpr int kMinBits = 1;
  static constexpr int kMaxBits = 3;

  explicit Precision(int bits);

  [[nodiscard]] constexpr int bits() const noexcept { return bits_; }
  // Largest storable code, 2^P - 1.
  [[nodiscard]] constexpr std::uint8_t max_code() const noexcept {
    return static_cast<std::uint8_t>((1U << bits_) - 1U);
  }
  [[nodiscard]] constexpr int levels() const noexcept { return 1 << bits_; }

  friend constexpr bool operator==(Precision, Precision) = default;

 private:
  int bits_;
};

struct RngSeed {
  std::uint64_t value = 0;
  friend constexpr bool operator==(RngSeed, RngSeed) = default;
};

// Stream tags for derive_seed.
namespace seed_stream {
inline constexpr std::uint64_t kLevels = 1;
inline constexpr std::uint64_t kBases = 2;
inline constexpr std::uint64_t kAdcSample = 3;
inline constexpr std::uint64_t kShuffle = 4;
inline constexpr std::uint64_t kNoise = 5;
}  // namespace seed_stream

// Derives an independent child seed for a named stream (levels, bases,
// shuffles, noise trials). SplitMix64 finalizer over seed ^ golden-ratio * tag.
[[nodiscard]] RngSeed derive_seed(RngSeed parent, std::uint64_t stream) noexcept;

// std::mt19937_64 with distribution mappings written out explicitly so the
// generated sequences do not depend on the standard library vendor:
//   below(n): rejection sampling on the raw 64-bit output, x % n
//   unit():   top 53 bits scaled by 2^-53
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  std::uint64_t next() { return engine_(); }
  std::uint64_t below(std::uint64_t bound);
  double unit();
  // Uniform P-bit code from the top bits of one draw.
  std::uint8_t code(int bits) { return static_cast<std::uint8_t>(engine_() >> (64 - bits)); }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

class Hypervector {
 public:
  // Throws invalid-dimension for an empty vector and invalid-range for any
  // component above 2^P - 1.
  Hypervector(Precision precision, std::vector<std::uint8_t> components);

  static Hypervector zeros(std::size_t dim, Precision precision);

  [[nodiscard]] std::size_t dim() const noexcept { return components_.size(); }
  [[nodiscard]] Precision precision() const noexcept { return precision_; }
  [[nodiscard]] std::uint8_t operator[](std::size_t i) const noexcept { return components_[i]; }
  [[nodiscard]] std::span<const std::uint8_t> components() const noexcept { return components_; }

  friend bool operator==(const Hypervector&, const Hypervector&) = default;

 private:
  Precision precision_;
  std::vector<std::uint8_t> components_;
};

// Non-quantized hypervector (trainer accumulators). Components stay finite.
class RealHypervector {
 public:
  explicit RealHypervector(std::vector<double> components);
  static RealHypervector zeros(std::size_t dim);
  static RealHypervector from(const Hypervector& hv);

  [[nodiscard]] std::size_t dim() const noexcept { return components_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return components_[i]; }
  [[nodiscard]] std::span<const double> components() const noexcept { return components_; }

  // this += scale * hv
  void add_scaled(const Hypervector& hv, double scale);
  void add(const Hypervector& hv);

  friend bool operator==(const RealHypervector&, const RealHypervector&) = default;

 private:
  std::vector<double> components_;
};

// Affine map of [lo, hi] onto {0, ..., 2^P - 1}: nearest code, ties toward the
// larger code, clamped. Throws invalid-range when lo >= hi.
[[nodiscard]] std::uint8_t quantize_value(double v, Precision precision, double lo, double hi);
[[nodiscard]] double dequantize_value(std::uint8_t code, Precision precision, double lo, double hi);

[[nodiscard]] Hypervector quantize_hv(std::span<const double> values, Precision precision, double lo,
                                      double hi);
[[nodiscard]] Hypervector quantize_hv(const RealHypervector& v, Precision precision, double lo, double hi);

[[nodiscard]] Hypervector random_hv(std::size_t dim, Precision precision, Rng& rng);
[[nodiscard]] Hypervector random_hv(std::size_t dim, Precision precision, RngSeed seed);

// Binary container:
//   "MIMH" | version:u8 (=1) | P:u8 | D:u32 LE | ceil(D*P/8) payload bytes
// Component i occupies stream bits [i*P, i*P + P), least significant bit
// first; the stream is packed LSB-first into bytes and zero padded.
inline constexpr std::uint8_t kHypervectorFormatVersion = 1;

void write_hv(std::ostream& out, const Hypervector& hv);
[[nodiscard]] Hypervector read_hv(std::istream& in);
[[nodiscard]] std::vector<std::uint8_t> pack_components(const Hypervector& hv);

}  // namespace mimhd
