#include "mimhd/hypervector.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "binary_io.hpp"
#include "mimhd/error.hpp"

namespace mimhd {

Precision::Precision(int bits) : bits_(bits) {
  if (bits < kMinBits || bits > kMaxBits) {
    throw Error(ErrorKind::invalid_config,
                "precision must be 1, 2 or 3 bits, got " + std::to_string(bits));
  }
}

RngSeed derive_seed(RngSeed parent, std::uint64_t stream) noexcept {
  std::uint64_t z = parent.value ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return RngSeed{z ^ (z >> 31)};
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::invalid_range, "Rng::below with zero bound");
  // Reject the low 2^64 mod bound outputs so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % bound;
  }
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Hypervector::Hypervector(Precision precision, std::vector<std::uint8_t> components)
    : precision_(precision), components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorKind::invalid_dimension, "hypervector dimension must be >= 1");
  const auto max = precision_.max_code();
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i] > max) {
      throw Error(ErrorKind::invalid_range, "component " + std::to_string(i) + " = " +
                                                std::to_string(components_[i]) + " exceeds " +
                                                std::to_string(max));
    }
  }
}

Hypervector Hypervector::zeros(std::size_t dim, Precision precision) {
  return Hypervector(precision, std::vector<std::uint8_t>(dim, 0));
}

RealHypervector::RealHypervector(std::vector<double> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorKind::invalid_dimension, "hypervector dimension must be >= 1");
  for (double c : components_) {
    if (!std::isfinite(c)) throw Error(ErrorKind::invalid_range, "non-finite real hypervector component");
  }
}

RealHypervector RealHypervector::zeros(std::size_t dim) { return RealHypervector(std::vector<double>(dim, 0.0)); }

RealHypervector RealHypervector::from(const Hypervector& hv) {
  std::vector<double> values(hv.components().begin(), hv.components().end());
  return RealHypervector(std::move(values));
}

void RealHypervector::add_scaled(const Hypervector& hv, double scale) {
  if (hv.dim() != dim()) throw Error(ErrorKind::shape, "dimension mismatch in add_scaled");
  const auto src = hv.components();
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += scale * static_cast<double>(src[i]);
}

void RealHypervector::add(const Hypervector& hv) {
  if (hv.dim() != dim()) throw Error(ErrorKind::shape, "dimension mismatch in add");
  const auto src = hv.components();
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += static_cast<double>(src[i]);
}

std::uint8_t quantize_value(double v, Precision precision, double lo, double hi) {
  if (!(lo < hi)) {
    throw Error(ErrorKind::invalid_range,
                "quantization range requires lo < hi (lo=" + std::to_string(lo) + ", hi=" + std::to_string(hi) + ")");
  }
  const double max = precision.max_code();
  const double scaled = (v - lo) / (hi - lo) * max;
  // floor(x + 0.5) is round-half-up; comparisons also absorb +-inf.
  const double rounded = std::floor(scaled + 0.5);
  if (!(rounded > 0.0)) return 0;
  if (rounded >= max) return precision.max_code();
  return static_cast<std::uint8_t>(rounded);
}

double dequantize_value(std::uint8_t code, Precision precision, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(code) / static_cast<double>(precision.max_code());
}

Hypervector quantize_hv(std::span<const double> values, Precision precision, double lo, double hi) {
  if (!(lo < hi)) {
    throw Error(ErrorKind::invalid_range,
                "quantization range requires lo < hi (lo=" + std::to_string(lo) + ", hi=" + std::to_string(hi) + ")");
  }
  std::vector<std::uint8_t> codes(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) codes[i] = quantize_value(values[i], precision, lo, hi);
  return Hypervector(precision, std::move(codes));
}

Hypervector quantize_hv(const RealHypervector& v, Precision precision, double lo, double hi) {
  return quantize_hv(v.components(), precision, lo, hi);
}

Hypervector random_hv(std::size_t dim, Precision precision, Rng& rng) {
  if (dim == 0) throw Error(ErrorKind::invalid_dimension, "random_hv requires d >= 1");
  std::vector<std::uint8_t> codes(dim);
  for (auto& c : codes) c = rng.code(precision.bits());
  return Hypervector(precision, std::move(codes));
}

Hypervector random_hv(std::size_t dim, Precision precision, RngSeed seed) {
  Rng rng(seed);
  return random_hv(dim, precision, rng);
}

std::vector<std::uint8_t> pack_components(const Hypervector& hv) {
  const int bits = hv.precision().bits();
  std::vector<std::uint8_t> bytes((hv.dim() * static_cast<std::size_t>(bits) + 7) / 8, 0);
  std::size_t pos = 0;
  for (std::uint8_t c : hv.components()) {
    for (int b = 0; b < bits; ++b, ++pos) {
      if ((c >> b) & 1U) bytes[pos / 8] |= static_cast<std::uint8_t>(1U << (pos % 8));
    }
  }
  return bytes;
}

void write_hv(std::ostream& out, const Hypervector& hv) {
  if (hv.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::invalid_dimension, "dimension does not fit the container header");
  }
  out.write("MIMH", 4);
  detail::write_u8(out, kHypervectorFormatVersion);
  detail::write_u8(out, static_cast<std::uint8_t>(hv.precision().bits()));
  detail::write_u32(out, static_cast<std::uint32_t>(hv.dim()));
  const auto bytes = pack_components(hv);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "failed writing hypervector");
}

Hypervector read_hv(std::istream& in) {
  detail::expect_magic(in, "MIMH", "hypervector header");
  const auto version = detail::read_u8(in, "hypervector version");
  if (version != kHypervectorFormatVersion) {
    throw Error(ErrorKind::parse, "unsupported hypervector container version " + std::to_string(version));
  }
  const int bits = detail::read_u8(in, "hypervector precision");
  if (bits < Precision::kMinBits || bits > Precision::kMaxBits) {
    throw Error(ErrorKind::parse, "hypervector precision byte out of range: " + std::to_string(bits));
  }
  const Precision precision(bits);
  const std::size_t dim = detail::read_u32(in, "hypervector dimension");
  if (dim == 0) throw Error(ErrorKind::parse, "hypervector dimension is zero");
  std::vector<std::uint8_t> bytes((dim * static_cast<std::size_t>(bits) + 7) / 8);
  detail::read_exact(in, reinterpret_cast<char*>(bytes.data()), bytes.size(), "hypervector payload");
  std::vector<std::uint8_t> codes(dim, 0);
  std::size_t pos = 0;
  for (auto& c : codes) {
    for (int b = 0; b < bits; ++b, ++pos) {
      if ((bytes[pos / 8] >> (pos % 8)) & 1U) c |= static_cast<std::uint8_t>(1U << b);
    }
  }
  return Hypervector(precision, std::move(codes));
}

}  // namespace mimhd
