#pragma once

// Little-endian primitives shared by the hypervector container and the
// model bundle.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "mimhd/error.hpp"

namespace mimhd::detail {

inline void write_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

inline void write_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(b.data(), b.size());
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(b.data(), b.size());
}

inline void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline void write_i32(std::ostream& out, std::int32_t v) { write_u32(out, static_cast<std::uint32_t>(v)); }

inline void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  const auto offset = static_cast<long long>(in.tellg());
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(ErrorKind::parse, std::string("truncated ") + what + " at byte offset " +
                                      std::to_string(offset < 0 ? 0 : offset));
  }
}

inline std::uint8_t read_u8(std::istream& in, const char* what) {
  char c = 0;
  read_exact(in, &c, 1, what);
  return static_cast<std::uint8_t>(c);
}

inline std::uint32_t read_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), b.size(), what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t read_u64(std::istream& in, const char* what) {
  std::array<unsigned char, 8> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), b.size(), what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double read_f64(std::istream& in, const char* what) { return std::bit_cast<double>(read_u64(in, what)); }

inline std::int32_t read_i32(std::istream& in, const char* what) {
  return static_cast<std::int32_t>(read_u32(in, what));
}

inline void expect_magic(std::istream& in, const char (&magic)[5], const char* what) {
  std::array<char, 4> got{};
  const auto offset = static_cast<long long>(in.tellg());
  read_exact(in, got.data(), got.size(), what);
  if (std::memcmp(got.data(), magic, 4) != 0) {
    throw Error(ErrorKind::parse, std::string("bad magic for ") + what + " at byte offset " +
                                      std::to_string(offset < 0 ? 0 : offset));
  }
}

}  // namespace mimhd::detail
