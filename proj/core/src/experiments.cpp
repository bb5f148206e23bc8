#include "mimhd/experiments.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mimhd/error.hpp"

namespace mimhd {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
  if (dims.empty() || precisions.empty() || metrics.empty()) {
    throw Error(ErrorKind::invalid_config, "sweep lists (dim, precision, metric) must be nonempty");
  }
  for (int p : precisions) (void)Precision(p);
  if (base_precision) (void)Precision(*base_precision);
  for (std::size_t d : dims) {
    if (d < static_cast<std::size_t>(levels)) {
      throw Error(ErrorKind::invalid_config, "D=" + std::to_string(d) + " is smaller than m=" + std::to_string(levels));
    }
  }
  if (levels < 2) throw Error(ErrorKind::invalid_config, "level count must be >= 2");
  hwart.validate();
  (void)McamKernel(mcam_gmax, mcam_beta, 1);
  if (noise) noise->validate();
}

ExperimentConfig ExperimentConfig::canonical() const {
  ExperimentConfig c = *this;
  std::sort(c.dims.begin(), c.dims.end());
  c.dims.erase(std::unique(c.dims.begin(), c.dims.end()), c.dims.end());
  std::sort(c.precisions.begin(), c.precisions.end());
  c.precisions.erase(std::unique(c.precisions.begin(), c.precisions.end()), c.precisions.end());
  auto by_name = [](Metric a, Metric b) { return to_string(a) < to_string(b); };
  std::sort(c.metrics.begin(), c.metrics.end(), by_name);
  c.metrics.erase(std::unique(c.metrics.begin(), c.metrics.end()), c.metrics.end());
  return c;
}

EncoderConfig encoder_config(const ExperimentConfig& cfg, std::size_t dim, int precision, std::size_t features) {
  EncoderConfig ec;
  ec.dim = dim;
  ec.precision = Precision(precision);
  if (cfg.base_precision) ec.base_precision = Precision(*cfg.base_precision);
  ec.levels = cfg.levels;
  ec.arithmetic = cfg.arithmetic;
  ec.features = features;
  ec.seed = cfg.seed;
  return ec;
}

std::vector<LabeledHv> encode_dataset(const Encoder& encoder, const Dataset& ds) {
  ds.validate();
  auto hvs = encoder.encode_all(ds.rows());
  std::vector<LabeledHv> out;
  out.reserve(hvs.size());
  for (std::size_t i = 0; i < hvs.size(); ++i) out.push_back(LabeledHv{std::move(hvs[i]), ds.labels[i]});
  return out;
}

EncodedSplits encode_splits(const DatasetPair& data, const EncoderConfig& base) {
  data.train.validate();
  data.test.validate();
  if (data.train.size() == 0 || data.test.size() == 0) {
    throw Error(ErrorKind::invalid_input, "both dataset splits must be nonempty");
  }
  EncoderConfig cfg = base;
  cfg.features = data.train.features;
  Encoder encoder(cfg, normalize(data.train, cfg.levels));
  encoder.calibrate(data.train.rows());

  auto train = encode_dataset(encoder, data.train);
  auto test = encode_dataset(encoder, data.test);
  auto classes = data.train.classes();
  return EncodedSplits{std::move(encoder), std::move(train), std::move(test), std::move(classes)};
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

double parse_double_field(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(ErrorKind::parse, "bad number '" + s + "' in result row");
  return v;
}

std::size_t parse_size_field(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(ErrorKind::parse, "bad integer '" + s + "' in result row");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto end = line.find(',', start);
    out.push_back(line.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

McamKernel kernel_for(const ExperimentConfig& cfg, Precision p) {
  return McamKernel::for_precision(p, cfg.mcam_gmax, cfg.mcam_beta);
}

}  // namespace

std::string result_header() {
  return "dataset,dim,precision,metric,retrained,accuracy,train_accuracy,epochs,stop_reason,crossbar_arrays,"
         "mcam_arrays,adc_conversions,noise_rate,noisy_accuracy";
}

std::string format_row(const ResultRow& r) {
  std::ostringstream ss;
  ss << r.dataset << ',' << r.dim << ',' << r.precision << ',' << to_string(r.metric) << ',' << (r.retrained ? 1 : 0)
     << ',' << format_double(r.accuracy) << ',' << format_double(r.train_accuracy) << ',' << r.epochs << ','
     << r.stop_reason << ',' << r.crossbar_arrays << ',' << r.mcam_arrays << ',' << r.adc_conversions << ','
     << (r.noise_rate ? format_double(*r.noise_rate) : "") << ','
     << (r.noisy_accuracy ? format_double(*r.noisy_accuracy) : "");
  return ss.str();
}

ResultRow parse_row(const std::string& line) {
  const auto f = split_csv_line(line);
  if (f.size() != 14) throw Error(ErrorKind::parse, "result row has " + std::to_string(f.size()) + " fields, expected 14");
  ResultRow r;
  r.dataset = f[0];
  r.dim = parse_size_field(f[1]);
  r.precision = static_cast<int>(parse_size_field(f[2]));
  r.metric = parse_metric(f[3]);
  r.retrained = parse_size_field(f[4]) != 0;
  r.accuracy = parse_double_field(f[5]);
  r.train_accuracy = parse_double_field(f[6]);
  r.epochs = parse_size_field(f[7]);
  r.stop_reason = f[8];
  r.crossbar_arrays = parse_size_field(f[9]);
  r.mcam_arrays = parse_size_field(f[10]);
  r.adc_conversions = parse_size_field(f[11]);
  if (!f[12].empty()) r.noise_rate = parse_double_field(f[12]);
  if (!f[13].empty()) r.noisy_accuracy = parse_double_field(f[13]);
  return r;
}

std::vector<ResultRow> read_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != result_header()) {
    throw Error(ErrorKind::parse, path.string() + ": missing or unexpected result header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

ResultWriter::ResultWriter(fs::path path, const std::string& metadata)
    : path_(std::move(path)), rows_(path_, std::ios::binary | std::ios::trunc) {
  if (!rows_) throw Error(ErrorKind::io, "cannot write " + path_.string());
  rows_ << result_header() << '\n';
  rows_.flush();
  timing_.open(fs::path(path_.string() + ".timing.csv"), std::ios::binary | std::ios::trunc);
  timing_ << "dataset,dim,precision,metric,retrained,wall_seconds\n";
  timing_.flush();
  std::ofstream meta(fs::path(path_.string() + ".meta.json"), std::ios::binary | std::ios::trunc);
  meta << metadata << '\n';
}

void ResultWriter::append(const ResultRow& row) {
  rows_ << format_row(row) << '\n';
  rows_.flush();
  if (!rows_) throw Error(ErrorKind::io, "failed appending to " + path_.string());
  timing_ << row.dataset << ',' << row.dim << ',' << row.precision << ',' << to_string(row.metric) << ','
          << (row.retrained ? 1 : 0) << ',' << format_double(row.wall_seconds) << '\n';
  timing_.flush();
}

std::string metadata_json(const ExperimentConfig& cfg, const std::string& command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["dataset"] = {{"name", cfg.dataset.name},
                  {"train", cfg.dataset.train.string()},
                  {"test", cfg.dataset.test.string()},
                  {"train_labels", cfg.dataset.train_labels.string()},
                  {"test_labels", cfg.dataset.test_labels.string()}};
  j["dims"] = cfg.dims;
  j["precisions"] = cfg.precisions;
  std::vector<std::string> metrics;
  for (auto m : cfg.metrics) metrics.emplace_back(to_string(m));
  j["metrics"] = metrics;
  j["seed"] = cfg.seed.value;
  j["levels"] = cfg.levels;
  j["base_precision"] = cfg.base_precision ? nlohmann::ordered_json(*cfg.base_precision) : nlohmann::ordered_json();
  j["arithmetic"] = std::string(to_string(cfg.arithmetic));
  j["retrain"] = cfg.retrain;
  j["hwart"] = {{"eta", cfg.hwart.eta},
                {"batch_size", cfg.hwart.batch_size},
                {"max_epochs", cfg.hwart.max_epochs},
                {"patience", cfg.hwart.patience},
                {"stability_epsilon", cfg.hwart.stability_epsilon}};
  j["mcam"] = {{"beta", cfg.mcam_beta}, {"g_max", cfg.mcam_gmax}};
  if (cfg.noise) {
    j["noise"] = {{"flip_rate", cfg.noise->flip_rate},
                  {"targets", cfg.noise->targets.bits},
                  {"seed", cfg.noise->seed.value}};
  }
  return j.dump(2);
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  require_files(cfg.dataset);
  const auto data = load_dataset(cfg.dataset);
  return run_sweep(cfg, data);
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& raw, const DatasetPair& data) {
  raw.validate();
  const ExperimentConfig cfg = raw.canonical();
  std::optional<ResultWriter> writer;
  if (!cfg.output.empty()) writer.emplace(cfg.output, metadata_json(cfg, "sweep"));

  const std::string name = cfg.dataset.name.empty() ? data.train.name : cfg.dataset.name;
  std::vector<ResultRow> rows;
  for (std::size_t dim : cfg.dims) {
    for (int p : cfg.precisions) {
      const auto encode_start = std::chrono::steady_clock::now();
      const auto splits = encode_splits(data, encoder_config(cfg, dim, p, data.train.features));
      const double encode_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - encode_start).count();
      const Precision precision(p);
      const McamKernel kernel = kernel_for(cfg, precision);
      const TilingReport tiling = tile(splits.encoder.config(), splits.classes.size());

      for (Metric metric : cfg.metrics) {
        const auto start = std::chrono::steady_clock::now();
        Model model = train_single_pass(splits.train, splits.classes);
        ResultRow row;
        row.dataset = name;
        row.dim = dim;
        row.precision = p;
        row.metric = metric;
        row.retrained = cfg.retrain;
        row.stop_reason = "none";
        if (cfg.retrain) {
          HwartConfig hc = cfg.hwart;
          hc.seed = cfg.seed;
          const TrainReport report = hwart_train(model, splits.train, hc, metric, &kernel);
          row.epochs = report.epochs;
          row.stop_reason = std::string(to_string(report.stop_reason));
          row.train_accuracy =
              report.epochs > 0 ? report.epoch_accuracy.back() : evaluate(model, splits.train, metric, &kernel);
        } else {
          row.train_accuracy = evaluate(model, splits.train, metric, &kernel);
        }
        row.accuracy = evaluate(model, splits.test, metric, &kernel);
        row.crossbar_arrays = tiling.crossbar_arrays;
        row.mcam_arrays = tiling.mcam_arrays;
        row.adc_conversions = tiling.adc_conversions_per_encode;
        if (cfg.noise) {
          const double rates[] = {cfg.noise->flip_rate};
          const auto noisy =
              robustness_experiment(model, splits.test, metric, &kernel, rates, 1, cfg.noise->seed, cfg.noise->targets);
          row.noise_rate = cfg.noise->flip_rate;
          row.noisy_accuracy = noisy.front().mean_noisy_accuracy;
        }
        row.wall_seconds = encode_seconds +
                           std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (writer) writer->append(row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

MetricComparison compare_metrics(const ExperimentConfig& cfg) {
  cfg.validate();
  require_files(cfg.dataset);
  const auto data = load_dataset(cfg.dataset);
  return compare_metrics(cfg, data);
}

MetricComparison compare_metrics(const ExperimentConfig& cfg, const DatasetPair& data) {
  cfg.validate();
  const std::size_t dim = cfg.dims.front();
  const int p = cfg.precisions.front();
  const auto splits = encode_splits(data, encoder_config(cfg, dim, p, data.train.features));
  const McamKernel kernel = kernel_for(cfg, Precision(p));

  const Model single = train_single_pass(splits.train, splits.classes);
  MetricComparison out;
  out.dim = dim;
  out.precision = p;
  out.cosine_cosine = evaluate(single, splits.test, Metric::cosine);
  out.cosine_mcam = evaluate(single, splits.test, Metric::mcam, &kernel);
  out.cosine_hamming = evaluate(single, splits.test, Metric::hamming);

  Model retrained = single;
  HwartConfig hc = cfg.hwart;
  hc.seed = cfg.seed;
  const TrainReport report = hwart_train(retrained, splits.train, hc, Metric::mcam, &kernel);
  out.hwart_mcam = evaluate(retrained, splits.test, Metric::mcam, &kernel);
  out.hwart_epochs = report.epochs;
  return out;
}

std::vector<RobustnessResult> run_robustness(const ExperimentConfig& raw, const DatasetPair& data,
                                             const std::vector<double>& rates, std::size_t trials) {
  raw.validate();
  const ExperimentConfig cfg = raw.canonical();
  const NoiseTargets targets = cfg.noise ? cfg.noise->targets : NoiseTargets{};
  const std::string name = cfg.dataset.name.empty() ? data.train.name : cfg.dataset.name;
  std::vector<RobustnessResult> out;
  for (std::size_t dim : cfg.dims) {
    for (int p : cfg.precisions) {
      const auto splits = encode_splits(data, encoder_config(cfg, dim, p, data.train.features));
      const McamKernel kernel = kernel_for(cfg, Precision(p));
      for (Metric metric : cfg.metrics) {
        Model model = train_single_pass(splits.train, splits.classes);
        if (cfg.retrain) {
          HwartConfig hc = cfg.hwart;
          hc.seed = cfg.seed;
          (void)hwart_train(model, splits.train, hc, metric, &kernel);
        }
        const auto rows = robustness_experiment(model, splits.test, metric, &kernel, rates, trials,
                                                derive_seed(cfg.seed, seed_stream::kNoise), targets);
        for (const auto& r : rows) out.push_back(RobustnessResult{name, dim, p, metric, cfg.retrain, r});
      }
    }
  }
  return out;
}

std::string robustness_header() {
  return "dataset,dim,precision,metric,retrained,rate,trials,clean_accuracy,noisy_accuracy,mean_loss,loss_stddev";
}

std::string format_robustness(const RobustnessResult& r) {
  std::ostringstream ss;
  ss << r.dataset << ',' << r.dim << ',' << r.precision << ',' << to_string(r.metric) << ',' << (r.retrained ? 1 : 0)
     << ',' << format_double(r.row.rate) << ',' << r.row.trials << ',' << format_double(r.row.clean_accuracy) << ','
     << format_double(r.row.mean_noisy_accuracy) << ',' << format_double(r.row.mean_loss) << ','
     << format_double(r.row.loss_stddev);
  return ss.str();
}

namespace {

template <typename T>
std::vector<T> parse_number_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  for (const auto& item : split_list(value)) {
    T v{};
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorKind::invalid_config, "'" + key + "' has a malformed entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::invalid_config, "'" + key + "' is empty");
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  const auto list = parse_number_list<T>(key, value);
  if (list.size() != 1) throw Error(ErrorKind::invalid_config, "'" + key + "' expects a single value");
  return list.front();
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::invalid_config, "'" + key + "' expects a boolean");
}

NoiseTargets parse_targets(const std::string& v) {
  NoiseTargets t{0};
  for (const auto& item : split_list(v)) {
    if (item == "query" || item == "encoded_query") {
      t.bits |= static_cast<std::uint8_t>(NoiseTarget::encoded_query);
    } else if (item == "classes" || item == "class_hvs") {
      t.bits |= static_cast<std::uint8_t>(NoiseTarget::class_hvs);
    } else {
      throw Error(ErrorKind::invalid_config, "unknown noise target '" + item + "'");
    }
  }
  return t;
}

}  // namespace

ExperimentConfig experiment_from_config(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  auto get = [&kv](const char* key) { return kv.get(key); };
  const fs::path data_dir = get("data-dir").value_or("data");
  if (auto v = get("dataset")) cfg.dataset = resolve_dataset(*v, data_dir, kv);
  if (auto v = get("dim")) cfg.dims = parse_number_list<std::size_t>("dim", *v);
  if (auto v = get("precision")) cfg.precisions = parse_number_list<int>("precision", *v);
  if (auto v = get("metric")) {
    cfg.metrics.clear();
    for (const auto& m : split_list(*v)) cfg.metrics.push_back(parse_metric(m));
  }
  if (auto v = get("seed")) cfg.seed = RngSeed{parse_number<std::uint64_t>("seed", *v)};
  if (auto v = get("levels")) cfg.levels = parse_number<int>("levels", *v);
  if (auto v = get("base-precision")) cfg.base_precision = parse_number<int>("base-precision", *v);
  if (auto v = get("arithmetic")) cfg.arithmetic = parse_code_interpretation(*v);
  if (auto v = get("retrain")) cfg.retrain = parse_bool("retrain", *v);
  if (auto v = get("eta")) cfg.hwart.eta = parse_number<double>("eta", *v);
  if (auto v = get("batch-size")) cfg.hwart.batch_size = parse_number<std::size_t>("batch-size", *v);
  if (auto v = get("max-epochs")) cfg.hwart.max_epochs = parse_number<std::size_t>("max-epochs", *v);
  if (auto v = get("patience")) cfg.hwart.patience = parse_number<std::size_t>("patience", *v);
  if (auto v = get("stability-epsilon")) cfg.hwart.stability_epsilon = parse_number<double>("stability-epsilon", *v);
  if (auto v = get("mcam-beta")) cfg.mcam_beta = parse_number<double>("mcam-beta", *v);
  if (auto v = get("mcam-gmax")) cfg.mcam_gmax = parse_number<double>("mcam-gmax", *v);
  if (auto v = get("output")) cfg.output = *v;
  if (auto v = get("noise-rate")) {
    NoiseSpec spec;
    spec.flip_rate = parse_number<double>("noise-rate", *v);
    if (auto t = get("noise-targets")) spec.targets = parse_targets(*t);
    spec.seed = derive_seed(cfg.seed, seed_stream::kNoise);
    cfg.noise = spec;
  }
  return cfg;
}

}  // namespace mimhd
