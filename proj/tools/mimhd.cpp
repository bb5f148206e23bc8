// mimhd: train, retrain, evaluate and sweep multi-bit HDC models.
//
// Every option can also come from a key/value file given with --config; a
// flag on the command line overrides the file. Keys use the long flag names
// without dashes in front (dim = 4000, mcam-beta = 0.5, ...).

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mimhd/bundle.hpp"
#include "mimhd/config.hpp"
#include "mimhd/error.hpp"
#include "mimhd/experiments.hpp"
#include "mimhd/hardware.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mimhd;

namespace {

// String-valued flags collected per subcommand and merged over the config
// file afterwards, so the library parses both sources the same way.
struct Flags {
  std::map<std::string, std::string> values;
  std::string config_path;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    app->add_option("--" + key, values[key], help);
  }

  KeyValueConfig merged(const CLI::App* app) const {
    KeyValueConfig kv = config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(config_path);
    for (const auto& [key, value] : values) {
      if (app->count("--" + key) > 0) kv.set(key, value);
    }
    // --train/--test describe an ad-hoc dataset source.
    static const std::map<std::string, std::string> source_keys{
        {"train", "train"},       {"test", "test"},           {"train-labels", "train_labels"},
        {"test-labels", "test_labels"}, {"format", "format"}, {"label-column", "label_column"},
        {"delimiter", "delimiter"}, {"header", "header"}};
    bool custom = false;
    for (const auto& [flag, key] : source_keys) custom |= kv.contains(flag);
    if (custom) {
      if (!kv.contains("dataset")) kv.set("dataset", "custom");
      const std::string prefix = "dataset." + *kv.get("dataset") + ".";
      // Files named on the command line are relative to the working
      // directory, not to --data-dir.
      static const std::set<std::string> paths{"train", "test", "train-labels", "test-labels"};
      for (const auto& [flag, key] : source_keys) {
        if (auto v = kv.get(flag)) kv.set(prefix + key, paths.contains(flag) ? fs::absolute(*v).string() : *v);
      }
    }
    return kv;
  }
};

void add_data_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "Key/value configuration file")->check(CLI::ExistingFile);
  f.add(app, "dataset", "Dataset name: mnist, isolet, ucihar, or any name defined in the config");
  f.add(app, "data-dir", "Root directory of the built-in dataset layouts (default: data)");
  f.add(app, "train", "Training split file (ad-hoc dataset)");
  f.add(app, "test", "Test split file (ad-hoc dataset)");
  f.add(app, "train-labels", "Training labels file (idx/split formats)");
  f.add(app, "test-labels", "Test labels file (idx/split formats)");
  f.add(app, "format", "csv, idx or split");
  f.add(app, "label-column", "Label column in CSV rows; negative counts from the end (default -1)");
  f.add(app, "delimiter", "CSV delimiter: comma, tab, space or a single character");
  f.add(app, "header", "auto, yes or no");
}

void add_encoder_flags(CLI::App* app, Flags& f) {
  f.add(app, "dim", "Hypervector dimensionality D (list for sweeps)");
  f.add(app, "precision", "Bits per component P in {1,2,3} (list for sweeps)");
  f.add(app, "levels", "Feature quantization levels m (default 64)");
  f.add(app, "base-precision", "Bits per base-HV component (default: P)");
  f.add(app, "arithmetic", "Crossbar code interpretation: centered (default) or unsigned");
  f.add(app, "seed", "Random seed");
}

void add_search_flags(CLI::App* app, Flags& f) {
  f.add(app, "metric", "cosine, hamming or mcam (list for sweeps)");
  f.add(app, "mcam-beta", "MCAM kernel steepness per level step (default 1.0)");
  f.add(app, "mcam-gmax", "MCAM saturated cell conductance (default 1.0)");
}

void add_hwart_flags(CLI::App* app, Flags& f) {
  f.add(app, "eta", "HWART learning rate (default 0.05)");
  f.add(app, "batch-size", "Samples between syncs of the quantized model (default 64)");
  f.add(app, "max-epochs", "Epoch cap (default 50)");
  f.add(app, "patience", "Stable epochs required to stop (default 3)");
  f.add(app, "stability-epsilon", "Accuracy change counted as stable (default 0.001)");
}

void add_noise_flags(CLI::App* app, Flags& f) {
  f.add(app, "noise-rate", "Bit-flip probability applied at inference");
  f.add(app, "noise-targets", "query, classes, or both (default both)");
}

McamKernel kernel_of(const ExperimentConfig& cfg, Precision p) {
  return McamKernel::for_precision(p, cfg.mcam_gmax, cfg.mcam_beta);
}

DatasetPair load_configured(const ExperimentConfig& cfg) {
  if (cfg.dataset.name.empty()) throw Error(ErrorKind::invalid_config, "no dataset given (--dataset or --train/--test)");
  return load_dataset(cfg.dataset);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_train(const ExperimentConfig& cfg, const fs::path& model_path) {
  const auto data = load_configured(cfg);
  const auto splits = encode_splits(data, encoder_config(cfg, cfg.dims.front(), cfg.precisions.front(),
                                                         data.train.features));
  const Model model = train_single_pass(splits.train, splits.classes);
  save_bundle(model_path, splits.encoder, model);
  const Metric metric = cfg.metrics.front();
  const auto kernel = kernel_of(cfg, model.precision());
  print({{"model", model_path.string()},
         {"classes", model.classes()},
         {"dim", model.dim()},
         {"precision", model.precision().bits()},
         {"metric", to_string(metric)},
         {"train_accuracy", evaluate(model, splits.train, metric, &kernel)},
         {"test_accuracy", evaluate(model, splits.test, metric, &kernel)}});
  return 0;
}

int cmd_retrain(const ExperimentConfig& cfg, const fs::path& model_path, const fs::path& out_path) {
  auto bundle = load_bundle(model_path);
  const auto data = load_configured(cfg);
  const auto train = encode_dataset(bundle.encoder, data.train);
  const auto test = encode_dataset(bundle.encoder, data.test);
  const Metric metric = cfg.metrics.front();
  const auto kernel = kernel_of(cfg, bundle.model.precision());
  HwartConfig hc = cfg.hwart;
  hc.seed = cfg.seed;
  const auto report = hwart_train(bundle.model, train, hc, metric, &kernel);
  save_bundle(out_path, bundle.encoder, bundle.model);
  print({{"model", out_path.string()},
         {"metric", to_string(metric)},
         {"initial_train_accuracy", report.initial_accuracy},
         {"epoch_train_accuracy", report.epoch_accuracy},
         {"epochs", report.epochs},
         {"stop_reason", to_string(report.stop_reason)},
         {"test_accuracy", evaluate(bundle.model, test, metric, &kernel)}});
  return 0;
}

int cmd_eval(const ExperimentConfig& cfg, const fs::path& model_path, std::size_t trials) {
  const auto bundle = load_bundle(model_path);
  const auto data = load_configured(cfg);
  const auto test = encode_dataset(bundle.encoder, data.test);
  json out{{"model", model_path.string()}};
  for (Metric metric : cfg.metrics) {
    const auto kernel = kernel_of(cfg, bundle.model.precision());
    json entry{{"metric", to_string(metric)}, {"accuracy", evaluate(bundle.model, test, metric, &kernel)}};
    if (cfg.noise) {
      const double rates[] = {cfg.noise->flip_rate};
      const auto rows = robustness_experiment(bundle.model, test, metric, &kernel, rates, trials,
                                              derive_seed(cfg.seed, seed_stream::kNoise), cfg.noise->targets);
      entry["noise_rate"] = cfg.noise->flip_rate;
      entry["trials"] = trials;
      entry["noisy_accuracy"] = rows.front().mean_noisy_accuracy;
      entry["loss_stddev"] = rows.front().loss_stddev;
    }
    out["results"].push_back(entry);
  }
  print(out);
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const auto rows = run_sweep(cfg);
  std::cout << result_header() << '\n';
  for (const auto& r : rows) std::cout << format_row(r) << '\n';
  return 0;
}

int cmd_compare(const ExperimentConfig& cfg) {
  const auto c = compare_metrics(cfg);
  print({{"dataset", cfg.dataset.name},
         {"dim", c.dim},
         {"precision", c.precision},
         {"cosine_trained_cosine_search", c.cosine_cosine},
         {"cosine_trained_mcam_search", c.cosine_mcam},
         {"cosine_trained_hamming_search", c.cosine_hamming},
         {"hwart_mcam_search", c.hwart_mcam},
         {"hwart_epochs", c.hwart_epochs},
         {"loss_without_hwart", c.loss_without_hwart()},
         {"loss_with_hwart", c.loss_with_hwart()}});
  return 0;
}

int cmd_robustness(const ExperimentConfig& cfg, const std::vector<double>& rates, std::size_t trials) {
  require_files(cfg.dataset);
  const auto data = load_configured(cfg);
  const auto results = run_robustness(cfg, data, rates, trials);
  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::io, "cannot write " + cfg.output.string());
    file << robustness_header() << '\n';
    std::ofstream(cfg.output.string() + ".meta.json", std::ios::binary | std::ios::trunc)
        << metadata_json(cfg, "robustness") << '\n';
  }
  std::cout << robustness_header() << '\n';
  for (const auto& r : results) {
    const auto line = format_robustness(r);
    std::cout << line << '\n';
    if (file) file << line << '\n' << std::flush;
  }
  return 0;
}

int cmd_tile(std::size_t features, std::size_t dim, std::size_t classes) {
  const auto t = tile(features, dim, classes);
  print({{"features", t.features},
         {"dim", t.dim},
         {"classes", t.classes},
         {"array_rows", t.array_rows},
         {"array_cols", t.array_cols},
         {"crossbar_arrays", t.crossbar_arrays},
         {"mcam_arrays", t.mcam_arrays},
         {"adc_conversions_per_encode", t.adc_conversions_per_encode},
         {"mcam_rows_used", t.mcam_rows_used},
         {"crossbar_activations_per_encode", t.crossbar_activations_per_encode},
         {"mcam_searches_per_query", t.mcam_searches_per_query},
         {"partial_tiles", t.partial_tiles}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-bit hyperdimensional computing with in-memory search models"};
  app.require_subcommand(1);

  Flags train_flags, retrain_flags, eval_flags, sweep_flags, compare_flags, robust_flags;
  std::string model_path, out_path;
  std::string rates_text = "0,0.01,0.05,0.1,0.2";
  std::size_t trials = 20;
  std::size_t tile_features = 0, tile_dim = 0, tile_classes = 0;

  auto* train = app.add_subcommand("train", "Single-pass training; writes a model bundle");
  add_data_flags(train, train_flags);
  add_encoder_flags(train, train_flags);
  add_search_flags(train, train_flags);
  train->add_option("--model", model_path, "Output model bundle")->required();

  auto* retrain = app.add_subcommand("retrain", "Hardware-aware retraining of a saved model");
  add_data_flags(retrain, retrain_flags);
  add_search_flags(retrain, retrain_flags);
  add_hwart_flags(retrain, retrain_flags);
  retrain_flags.add(retrain, "seed", "Shuffle seed");
  retrain->add_option("--model", model_path, "Input model bundle")->required()->check(CLI::ExistingFile);
  retrain->add_option("--out", out_path, "Output model bundle (default: overwrite --model)");

  auto* eval = app.add_subcommand("eval", "Test accuracy of a saved model, optionally under bit flips");
  add_data_flags(eval, eval_flags);
  add_search_flags(eval, eval_flags);
  add_noise_flags(eval, eval_flags);
  eval_flags.add(eval, "seed", "Noise seed");
  eval->add_option("--model", model_path, "Model bundle")->required()->check(CLI::ExistingFile);
  eval->add_option("--trials", trials, "Noise trials to average (default 20)");

  auto* sweep = app.add_subcommand("sweep", "Accuracy over dimension x precision x metric");
  add_data_flags(sweep, sweep_flags);
  add_encoder_flags(sweep, sweep_flags);
  add_search_flags(sweep, sweep_flags);
  add_hwart_flags(sweep, sweep_flags);
  add_noise_flags(sweep, sweep_flags);
  sweep_flags.add(sweep, "retrain", "Run HWART after single-pass training (default yes)");
  sweep_flags.add(sweep, "output", "Result file (header + one row per combination)");

  auto* compare = app.add_subcommand("compare-metrics", "Cosine vs MCAM search, with and without HWART");
  add_data_flags(compare, compare_flags);
  add_encoder_flags(compare, compare_flags);
  add_search_flags(compare, compare_flags);
  add_hwart_flags(compare, compare_flags);

  auto* robust = app.add_subcommand("robustness", "Accuracy loss under bit-flip noise");
  add_data_flags(robust, robust_flags);
  add_encoder_flags(robust, robust_flags);
  add_search_flags(robust, robust_flags);
  add_hwart_flags(robust, robust_flags);
  robust_flags.add(robust, "noise-targets", "query, classes, or both (default both)");
  robust_flags.add(robust, "retrain", "Run HWART before injecting noise (default yes)");
  robust_flags.add(robust, "output", "Result file");
  robust->add_option("--rates", rates_text, "Comma-separated flip rates");
  robust->add_option("--trials", trials, "Trials per rate (default 20)");

  auto* tiling = app.add_subcommand("tile", "64x64 array counts for a model shape (JSON)");
  tiling->add_option("--features", tile_features, "Feature count n")->required();
  tiling->add_option("--dim", tile_dim, "Dimensionality D")->required();
  tiling->add_option("--classes", tile_classes, "Class count k")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto config_of = [](const Flags& f, const CLI::App* sub) { return experiment_from_config(f.merged(sub)); };
    if (*train) return cmd_train(config_of(train_flags, train), model_path);
    if (*retrain) return cmd_retrain(config_of(retrain_flags, retrain), model_path,
                                     out_path.empty() ? model_path : out_path);
    if (*eval) return cmd_eval(config_of(eval_flags, eval), model_path, trials);
    if (*sweep) {
      const auto kv = sweep_flags.merged(sweep);
      if (!kv.contains("seed")) throw Error(ErrorKind::invalid_config, "sweep requires --seed (or seed in --config)");
      return cmd_sweep(experiment_from_config(kv));
    }
    if (*compare) return cmd_compare(config_of(compare_flags, compare));
    if (*robust) {
      std::vector<double> rates;
      for (const auto& item : split_list(rates_text)) {
        std::size_t used = 0;
        double v = 0;
        try {
          v = std::stod(item, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != item.size()) throw Error(ErrorKind::invalid_config, "malformed rate '" + item + "'");
        rates.push_back(v);
      }
      return cmd_robustness(config_of(robust_flags, robust), rates, trials);
    }
    if (*tiling) return cmd_tile(tile_features, tile_dim, tile_classes);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
