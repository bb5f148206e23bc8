#pragma once

// Model bundle: complete encoder state plus both model copies.
//
//   "MIMB" | version:u8 (=1)
//   encoder: D:u32 | P:u8 | base P:u8 | m:u32 | n:u32 |
//            arithmetic:u8 (0 unsigned, 1 centered) | seed:u64 |
//            adc_lo:f64 | adc_hi:f64 | n x (lo:f64, hi:f64) |
//            m level HVs | n base HVs            (each an "MIMH" container)
//   model:   k:u32 | P:u8 | range lo:f64 | range hi:f64 | k x label:i32 |
//            k x D real components:f64 | k quantized HVs ("MIMH")
// All integers and IEEE-754 doubles are little-endian.

#include <filesystem>
#include <iosfwd>

#include "mimhd/encoder.hpp"
#include "mimhd/trainer.hpp"

namespace mimhd {

inline constexpr std::uint8_t kBundleFormatVersion = 1;

struct ModelBundle {
  Encoder encoder;
  Model model;
};

void write_bundle(std::ostream& out, const Encoder& encoder, const Model& model);
[[nodiscard]] ModelBundle read_bundle(std::istream& in);

void save_bundle(const std::filesystem::path& path, const Encoder& encoder, const Model& model);
[[nodiscard]] ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace mimhd
