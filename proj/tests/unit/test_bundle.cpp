#include <doctest.h>

#include <sstream>

#include "mimhd/bundle.hpp"
#include "mimhd/experiments.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using namespace mimhd;

namespace {

ModelBundle trained(CodeInterpretation arithmetic, std::optional<Precision> base) {
  const auto data = testing::make_clusters({});
  EncoderConfig cfg;
  cfg.dim = 256;
  cfg.levels = 16;
  cfg.precision = Precision(3);
  cfg.base_precision = base;
  cfg.arithmetic = arithmetic;
  cfg.seed = RngSeed{17};
  auto splits = encode_splits(data, cfg);
  return ModelBundle{splits.encoder, train_single_pass(splits.train, splits.classes)};
}

void check_same(const ModelBundle& a, const ModelBundle& b) {
  const auto& ca = a.encoder.config();
  const auto& cb = b.encoder.config();
  CHECK(ca.dim == cb.dim);
  CHECK(ca.precision == cb.precision);
  CHECK(ca.effective_base_precision() == cb.effective_base_precision());
  CHECK(ca.levels == cb.levels);
  CHECK(ca.features == cb.features);
  CHECK(ca.arithmetic == cb.arithmetic);
  CHECK(ca.seed == cb.seed);
  CHECK(ca.adc == cb.adc);
  CHECK(a.encoder.quantizer() == b.encoder.quantizer());
  CHECK(a.encoder.levels() == b.encoder.levels());
  CHECK(a.encoder.bases() == b.encoder.bases());
  CHECK(a.model == b.model);
}

}  // namespace

TEST_CASE("bundles round trip") {
  for (auto arithmetic : {CodeInterpretation::unsigned_codes, CodeInterpretation::zero_centered}) {
    for (auto base : {std::optional<Precision>{}, std::optional<Precision>{Precision(1)}}) {
      const auto original = trained(arithmetic, base);
      std::stringstream buf;
      write_bundle(buf, original.encoder, original.model);
      check_same(original, read_bundle(buf));
    }
  }
}

TEST_CASE("bundles on disk reproduce predictions") {
  testing::TempDir dir;
  const auto original = trained(CodeInterpretation::zero_centered, std::nullopt);
  save_bundle(dir / "model.bin", original.encoder, original.model);
  const auto loaded = load_bundle(dir / "model.bin");
  const auto data = testing::make_clusters({});
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    const auto q1 = original.encoder.encode(data.test.row(i));
    const auto q2 = loaded.encoder.encode(data.test.row(i));
    CHECK(q1 == q2);
    CHECK(classify(q1, original.model, Metric::hamming).label == classify(q2, loaded.model, Metric::hamming).label);
  }
  CHECK_ERROR_KIND(ErrorKind::io, load_bundle(dir / "absent.bin"));
}

TEST_CASE("corrupt bundles are rejected") {
  const auto original = trained(CodeInterpretation::zero_centered, std::nullopt);
  std::ostringstream out;
  write_bundle(out, original.encoder, original.model);
  const std::string good = out.str();

  std::string magic = good;
  magic[1] = '?';
  std::istringstream bad_magic(magic);
  CHECK_ERROR_KIND(ErrorKind::parse, read_bundle(bad_magic));

  std::string version = good;
  version[4] = 9;
  std::istringstream bad_version(version);
  CHECK_ERROR_KIND(ErrorKind::parse, read_bundle(bad_version));

  for (std::size_t cut : {std::size_t{3}, std::size_t{20}, good.size() / 2, good.size() - 1}) {
    std::istringstream truncated(good.substr(0, cut));
    CHECK_ERROR_KIND(ErrorKind::parse, read_bundle(truncated));
  }
}
