#include "mimhd/bundle.hpp"

#include <fstream>
#include <limits>
#include <string>

#include "binary_io.hpp"
#include "mimhd/error.hpp"

namespace mimhd {

namespace {

std::uint32_t narrow32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorKind::invalid_config, std::string(what) + " too large");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_bundle(std::ostream& out, const Encoder& encoder, const Model& model) {
  const auto& cfg = encoder.config();
  if (model.dim() != cfg.dim) throw Error(ErrorKind::shape, "model dimension differs from encoder dimension");
  out.write("MIMB", 4);
  detail::write_u8(out, kBundleFormatVersion);

  detail::write_u32(out, narrow32(cfg.dim, "dimension"));
  detail::write_u8(out, static_cast<std::uint8_t>(cfg.precision.bits()));
  detail::write_u8(out, static_cast<std::uint8_t>(cfg.effective_base_precision().bits()));
  detail::write_u32(out, narrow32(static_cast<std::size_t>(cfg.levels), "level count"));
  detail::write_u32(out, narrow32(cfg.features, "feature count"));
  detail::write_u8(out, cfg.arithmetic == CodeInterpretation::zero_centered ? 1 : 0);
  detail::write_u64(out, cfg.seed.value);
  detail::write_f64(out, cfg.adc.lo);
  detail::write_f64(out, cfg.adc.hi);
  const auto& fq = encoder.quantizer();
  for (std::size_t k = 0; k < fq.features(); ++k) {
    detail::write_f64(out, fq.lo()[k]);
    detail::write_f64(out, fq.hi()[k]);
  }
  for (const auto& l : encoder.levels().rows()) write_hv(out, l);
  for (const auto& b : encoder.bases().rows()) write_hv(out, b);

  detail::write_u32(out, narrow32(model.classes(), "class count"));
  detail::write_u8(out, static_cast<std::uint8_t>(model.precision().bits()));
  detail::write_f64(out, model.range_lo());
  detail::write_f64(out, model.range_hi());
  for (int label : model.labels()) detail::write_i32(out, label);
  for (const auto& c : model.real_classes()) {
    for (double v : c.components()) detail::write_f64(out, v);
  }
  for (const auto& q : model.quant_classes()) write_hv(out, q);
  if (!out) throw Error(ErrorKind::io, "failed writing model bundle");
}

ModelBundle read_bundle(std::istream& in) {
  detail::expect_magic(in, "MIMB", "model bundle header");
  const auto version = detail::read_u8(in, "bundle version");
  if (version != kBundleFormatVersion) throw Error(ErrorKind::parse, "unsupported bundle version " + std::to_string(version));

  EncoderConfig cfg;
  cfg.dim = detail::read_u32(in, "encoder dimension");
  cfg.precision = Precision(detail::read_u8(in, "encoder precision"));
  const Precision base_precision(detail::read_u8(in, "base precision"));
  if (base_precision != cfg.precision) cfg.base_precision = base_precision;
  cfg.levels = static_cast<int>(detail::read_u32(in, "level count"));
  cfg.features = detail::read_u32(in, "feature count");
  const auto arithmetic = detail::read_u8(in, "arithmetic");
  if (arithmetic > 1) throw Error(ErrorKind::parse, "unknown arithmetic tag " + std::to_string(arithmetic));
  cfg.arithmetic = arithmetic == 1 ? CodeInterpretation::zero_centered : CodeInterpretation::unsigned_codes;
  cfg.seed = RngSeed{detail::read_u64(in, "seed")};
  cfg.adc.lo = detail::read_f64(in, "adc lo");
  cfg.adc.hi = detail::read_f64(in, "adc hi");
  cfg.validate();

  std::vector<double> lo(cfg.features), hi(cfg.features);
  for (std::size_t k = 0; k < cfg.features; ++k) {
    lo[k] = detail::read_f64(in, "feature lo");
    hi[k] = detail::read_f64(in, "feature hi");
  }
  FeatureQuantizer fq(std::move(lo), std::move(hi), cfg.levels);

  std::vector<Hypervector> levels;
  levels.reserve(static_cast<std::size_t>(cfg.levels));
  for (int j = 0; j < cfg.levels; ++j) levels.push_back(read_hv(in));
  std::vector<Hypervector> bases;
  bases.reserve(cfg.features);
  for (std::size_t k = 0; k < cfg.features; ++k) bases.push_back(read_hv(in));
  Encoder encoder(cfg, std::move(fq), LevelTable(std::move(levels)), BaseMatrix(std::move(bases)));

  const std::size_t k = detail::read_u32(in, "class count");
  if (k == 0) throw Error(ErrorKind::parse, "bundle holds an empty model");
  const Precision precision(detail::read_u8(in, "model precision"));
  const double range_lo = detail::read_f64(in, "model range lo");
  const double range_hi = detail::read_f64(in, "model range hi");
  std::vector<int> labels(k);
  for (auto& l : labels) l = detail::read_i32(in, "class label");
  std::vector<RealHypervector> real;
  real.reserve(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> v(cfg.dim);
    for (auto& x : v) x = detail::read_f64(in, "real class component");
    real.emplace_back(std::move(v));
  }
  std::vector<Hypervector> quant;
  quant.reserve(k);
  for (std::size_t c = 0; c < k; ++c) quant.push_back(read_hv(in));
  Model model(std::move(labels), std::move(real), std::move(quant), precision, range_lo, range_hi);
  return ModelBundle{std::move(encoder), std::move(model)};
}

void save_bundle(const std::filesystem::path& path, const Encoder& encoder, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  write_bundle(out, encoder, model);
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return read_bundle(in);
}

}  // namespace mimhd
