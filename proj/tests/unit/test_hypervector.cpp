#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mimhd/hypervector.hpp"
#include "test_util.hpp"

using namespace mimhd;

namespace {

std::vector<int> codes(const Hypervector& hv) { return {hv.components().begin(), hv.components().end()}; }

double hamming_fraction(const Hypervector& a, const Hypervector& b) {
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) diff += a[i] != b[i];
  return static_cast<double>(diff) / static_cast<double>(a.dim());
}

}  // namespace

TEST_CASE("precision accepts 1..3 bits only") {
  CHECK(Precision(1).max_code() == 1);
  CHECK(Precision(3).max_code() == 7);
  CHECK(Precision(2).levels() == 4);
  CHECK_ERROR_KIND(ErrorKind::invalid_config, Precision(0));
  CHECK_ERROR_KIND(ErrorKind::invalid_config, Precision(4));
}

TEST_CASE("quantize examples") {
  const std::vector<double> a{0.0, 0.5, 1.0};
  CHECK(codes(quantize_hv(a, Precision(2), 0.0, 1.0)) == std::vector<int>{0, 2, 3});
  const std::vector<double> b{-5.0, 7.0};
  CHECK(codes(quantize_hv(b, Precision(1), -5.0, 7.0)) == std::vector<int>{0, 1});
  // 0.1*7 = 0.7 -> 1, 0.4*7 = 2.8 -> 3, 0.9*7 = 6.3 -> 6
  const std::vector<double> c{0.1, 0.4, 0.9};
  CHECK(codes(quantize_hv(c, Precision(3), 0.0, 1.0)) == std::vector<int>{1, 3, 6});
}

TEST_CASE("quantize clamps outside the range and rejects empty ranges") {
  CHECK(quantize_value(-100.0, Precision(3), 0.0, 1.0) == 0);
  CHECK(quantize_value(100.0, Precision(3), 0.0, 1.0) == 7);
  CHECK_ERROR_KIND(ErrorKind::invalid_range, quantize_value(0.5, Precision(2), 1.0, 1.0));
  CHECK_ERROR_KIND(ErrorKind::invalid_range, quantize_value(0.5, Precision(2), 2.0, 1.0));
}

TEST_CASE("quantize is monotone") {
  Rng rng(RngSeed{11});
  for (int trial = 0; trial < 2000; ++trial) {
    const double lo = rng.unit() * 10 - 5;
    const double hi = lo + 0.01 + rng.unit() * 10;
    const double v = lo - 1 + rng.unit() * (hi - lo + 2);
    const double w = v + rng.unit() * 3;
    for (int bits = 1; bits <= 3; ++bits) {
      CHECK(quantize_value(v, Precision(bits), lo, hi) <= quantize_value(w, Precision(bits), lo, hi));
    }
  }
}

TEST_CASE("quantize of a dequantized code returns the code") {
  Rng rng(RngSeed{12});
  for (int trial = 0; trial < 200; ++trial) {
    const double lo = rng.unit() * 100 - 50;
    const double hi = lo + 0.001 + rng.unit() * 100;
    for (int bits = 1; bits <= 3; ++bits) {
      const Precision p(bits);
      for (int c = 0; c <= p.max_code(); ++c) {
        const auto code = static_cast<std::uint8_t>(c);
        CHECK(quantize_value(dequantize_value(code, p, lo, hi), p, lo, hi) == code);
      }
    }
  }
}

TEST_CASE("random hypervectors are balanced and near-orthogonal") {
  double mean_sum = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = random_hv(4000, Precision(1), RngSeed{seed});
    const auto b = random_hv(4000, Precision(1), RngSeed{seed + 1000});
    const double mean = std::accumulate(a.components().begin(), a.components().end(), 0.0) / 4000.0;
    CHECK(mean >= 0.47);
    CHECK(mean <= 0.53);
    const double h = hamming_fraction(a, b);
    CHECK(h >= 0.47);
    CHECK(h <= 0.53);
    mean_sum += mean;
  }
  CHECK(mean_sum / 100 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("random hypervector edge cases") {
  const auto one = random_hv(1, Precision(3), RngSeed{5});
  CHECK(one.dim() == 1);
  CHECK(one[0] <= 7);
  CHECK(random_hv(1, Precision(3), RngSeed{5}) == one);
  CHECK_ERROR_KIND(ErrorKind::invalid_dimension, random_hv(0, Precision(1), RngSeed{5}));

  // Every P=3 code shows up with roughly equal frequency.
  const auto hv = random_hv(8000, Precision(3), RngSeed{6});
  std::array<int, 8> counts{};
  for (auto c : hv.components()) ++counts[c];
  for (int n : counts) CHECK(std::abs(n - 1000) < 150);
}

TEST_CASE("random hypervectors are pinned for a fixed seed") {
  // Golden prefix: the generator and its mappings are fully specified, so
  // this sequence is the same on every platform.
  const auto hv = random_hv(12, Precision(3), RngSeed{42});
  const auto again = random_hv(12, Precision(3), RngSeed{42});
  CHECK(hv == again);
  CHECK(codes(hv) == std::vector<int>{6, 5, 6, 1, 7, 0, 4, 2, 2, 3, 0, 4});
}

TEST_CASE("derived seeds differ per stream and per parent") {
  const RngSeed s{7};
  CHECK(derive_seed(s, 1) != derive_seed(s, 2));
  CHECK(derive_seed(s, 1) != derive_seed(RngSeed{8}, 1));
  CHECK(derive_seed(s, 1) == derive_seed(s, 1));
}

TEST_CASE("rng below stays in bounds and shuffle permutes") {
  Rng rng(RngSeed{3});
  for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(std::span<int>(v));
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(sorted == expected);
  CHECK(v != expected);
}

TEST_CASE("hypervector construction validates") {
  CHECK_ERROR_KIND(ErrorKind::invalid_dimension, Hypervector(Precision(2), {}));
  CHECK_ERROR_KIND(ErrorKind::invalid_range, Hypervector(Precision(2), {0, 4}));
  CHECK_ERROR_KIND(ErrorKind::invalid_range, Hypervector(Precision(1), {2}));
  CHECK(Hypervector::zeros(5, Precision(3)).dim() == 5);
}

TEST_CASE("real hypervector arithmetic") {
  auto r = RealHypervector::zeros(3);
  const Hypervector h(Precision(2), {1, 2, 3});
  r.add(h);
  r.add_scaled(h, -0.5);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 1.5);
  CHECK_ERROR_KIND(ErrorKind::invalid_range, RealHypervector({1.0, std::nan("")}));
}

TEST_CASE("container layout") {
  const Hypervector hv(Precision(3), {1, 2, 7});
  std::ostringstream out;
  write_hv(out, hv);
  const std::string bytes = out.str();
  REQUIRE(bytes.size() == 4 + 1 + 1 + 4 + 2);
  CHECK(bytes.substr(0, 4) == "MIMH");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[5]) == 3);
  CHECK(static_cast<unsigned char>(bytes[6]) == 3);
  CHECK(static_cast<unsigned char>(bytes[7]) == 0);
  // bit stream 1,0,0 | 0,1,0 | 1,1,1 packed LSB first
  CHECK(static_cast<unsigned char>(bytes[10]) == 0xD1);
  CHECK(static_cast<unsigned char>(bytes[11]) == 0x01);
}

TEST_CASE("container round trip") {
  Rng rng(RngSeed{99});
  for (int trial = 0; trial < 100; ++trial) {
    const int bits = 1 + static_cast<int>(rng.below(3));
    const std::size_t dim = 1 + rng.below(300);
    const auto hv = random_hv(dim, Precision(bits), rng);
    std::stringstream buf;
    write_hv(buf, hv);
    CHECK(read_hv(buf) == hv);
  }
}

TEST_CASE("container rejects corrupt input") {
  const Hypervector hv(Precision(2), {1, 2, 3, 0, 1});
  std::ostringstream out;
  write_hv(out, hv);
  const std::string good = out.str();

  std::istringstream truncated(good.substr(0, good.size() - 1));
  CHECK_ERROR_KIND(ErrorKind::parse, read_hv(truncated));

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  std::istringstream in_magic(bad_magic);
  CHECK_ERROR_KIND(ErrorKind::parse, read_hv(in_magic));

  std::string bad_precision = good;
  bad_precision[5] = 4;
  std::istringstream in_precision(bad_precision);
  CHECK(testing::error_kind([&] { (void)read_hv(in_precision); }).has_value());

  std::istringstream empty("");
  CHECK_ERROR_KIND(ErrorKind::parse, read_hv(empty));
}
