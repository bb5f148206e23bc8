// Acceptance criteria that need the ISOLET and UCIHAR benchmark files:
// precision ordering, dimensionality trend, HWART recovery and robustness
// ordering. Exits 77 (skipped) when the files are absent.
//
//   acceptance_datasets [--data-dir DIR] [--seeds N] [--proxy]
//
// DIR defaults to $MIMHD_DATA_DIR, then to the build-time default. --proxy
// additionally runs every criterion on ISOLET/UCIHAR-shaped synthetic
// clusters; those lines are informational and never decide the exit code.

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <optional>
#include <string>

#include "acceptance.hpp"
#include "mimhd/error.hpp"
#include "mimhd/experiments.hpp"
#include "synthetic.hpp"

using namespace mimhd;
using namespace mimhd::acceptance;

namespace {

constexpr std::size_t kMainDim = 4000;
constexpr std::size_t kSmallDim = 1000;
constexpr std::size_t kLargeDim = 8000;
constexpr double kPrecisionGap = 0.02;      // acc(P=3) - acc(P=1)
constexpr double kDimensionGap = 0.03;      // acc(8k) - acc(1k) at P=1
constexpr double kRecoveryRatio = 0.5;      // loss with HWART <= half the loss without
constexpr double kNoiseRate = 0.10;
constexpr std::size_t kNoiseTrials = 20;
constexpr double kOrderingSlack = 0.01;     // -1 pp per robustness gap
constexpr int kSkipExitCode = 77;

struct Outcome {
  double single_cosine = 0.0;  // single-pass model, cosine search
  double single_mcam = 0.0;    // single-pass model, MCAM search
  double hwart_mcam = 0.0;     // HWART-retrained model, MCAM search
  std::optional<RobustnessRow> clean, noisy;
};

struct Trained {
  Outcome outcome;
  std::optional<Model> model;
  std::vector<LabeledHv> test;
};

struct Runner {
  HwartConfig hwart;
  double beta = McamKernel::kDefaultBeta;
  std::map<std::tuple<const DatasetPair*, std::size_t, int, std::uint64_t>, Trained> cache;

  // Encode, single-pass train, HWART with MCAM in the loop; optionally the
  // robustness sweep on the retrained model.
  Outcome run(const DatasetPair& data, std::size_t dim, int bits, std::uint64_t seed, bool noise) {
    const auto kernel = McamKernel::for_precision(Precision(bits), McamKernel::kDefaultGMax, beta);
    auto& entry = cache[std::make_tuple(&data, dim, bits, seed)];
    if (!entry.model) {
      ExperimentConfig cfg;
      cfg.seed = RngSeed{seed};
      auto splits = encode_splits(data, encoder_config(cfg, dim, bits, data.train.features));
      Model model = train_single_pass(splits.train, splits.classes);
      entry.outcome.single_cosine = evaluate(model, splits.test, Metric::cosine);
      entry.outcome.single_mcam = evaluate(model, splits.test, Metric::mcam, &kernel);
      HwartConfig hc = hwart;
      hc.seed = RngSeed{seed};
      (void)hwart_train(model, splits.train, hc, Metric::mcam, &kernel);
      entry.outcome.hwart_mcam = evaluate(model, splits.test, Metric::mcam, &kernel);
      entry.model = std::move(model);
      entry.test = std::move(splits.test);
    }
    if (noise && !entry.outcome.noisy) {
      const double rates[] = {0.0, kNoiseRate};
      const auto rows = robustness_experiment(*entry.model, entry.test, Metric::mcam, &kernel, rates, kNoiseTrials,
                                              derive_seed(RngSeed{seed}, seed_stream::kNoise));
      entry.outcome.clean = rows[0];
      entry.outcome.noisy = rows[1];
    }
    return entry.outcome;
  }

  double mean_hwart(const DatasetPair& data, std::size_t dim, int bits, int seeds) {
    double sum = 0;
    for (int s = 1; s <= seeds; ++s) sum += run(data, dim, bits, static_cast<std::uint64_t>(s), false).hwart_mcam;
    return sum / seeds;
  }
};

std::string pct(double v) { return fmt("%.2f%%", 100.0 * v); }

void criterion_3(Report& report, Runner& runner, const std::vector<std::pair<std::string, const DatasetPair*>>& sets,
                 int seeds, const std::string& label) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, data] : sets) {
    const double a1 = runner.mean_hwart(*data, kMainDim, 1, seeds);
    const double a2 = runner.mean_hwart(*data, kMainDim, 2, seeds);
    const double a3 = runner.mean_hwart(*data, kMainDim, 3, seeds);
    const bool here = a3 >= a2 && a2 >= a1 && a3 - a1 >= kPrecisionGap;
    ok = ok && here;
    detail += fmt("%s P1 %s P2 %s P3 %s (P3-P1 %+.2f pp, need >= %.0f pp, ordered %s); ", name.c_str(),
                  pct(a1).c_str(), pct(a2).c_str(), pct(a3).c_str(), 100 * (a3 - a1), 100 * kPrecisionGap,
                  (a3 >= a2 && a2 >= a1) ? "yes" : "no");
  }
  report.record(3, label + "precision ordering, D=4k HWART+MCAM, mean of " + std::to_string(seeds) + " seeds", ok,
                detail);
}

void criterion_4(Report& report, Runner& runner, const DatasetPair& isolet, int seeds, const std::string& label) {
  const double small = runner.mean_hwart(isolet, kSmallDim, 1, seeds);
  const double large = runner.mean_hwart(isolet, kLargeDim, 1, seeds);
  report.record(4, label + "dimensionality trend, P=1", large - small >= kDimensionGap,
                fmt("D=1k %s, D=8k %s, gain %+.2f pp (need >= %.0f pp)", pct(small).c_str(), pct(large).c_str(),
                    100 * (large - small), 100 * kDimensionGap));
}

void criterion_5(Report& report, Runner& runner, const DatasetPair& isolet, int seeds, const std::string& label) {
  double without = 0, with = 0;
  for (int s = 1; s <= seeds; ++s) {
    const auto o = runner.run(isolet, kMainDim, 3, static_cast<std::uint64_t>(s), s == 1);
    without += o.single_cosine - o.single_mcam;
    with += o.single_cosine - o.hwart_mcam;
  }
  without /= seeds;
  with /= seeds;
  report.record(5, label + "HWART recovery, D=4k P=3", with <= kRecoveryRatio * without,
                fmt("loss vs cosine: cosine-trained MCAM %+.2f pp, HWART MCAM %+.2f pp (need <= %.1f x)",
                    100 * without, 100 * with, kRecoveryRatio));
}

void criterion_6(Report& report, Runner& runner, const DatasetPair& isolet, const std::string& label) {
  double loss[4] = {};
  bool zero_at_zero = true;
  for (int bits = 1; bits <= 3; ++bits) {
    const auto o = runner.run(isolet, kMainDim, bits, 1, true);
    loss[bits] = o.noisy->mean_loss;
    zero_at_zero = zero_at_zero && o.clean->mean_loss == 0.0;
  }
  const bool ordered = loss[1] <= loss[2] + kOrderingSlack && loss[2] <= loss[3] + kOrderingSlack;
  report.record(6, label + "robustness ordering at 10% flips, D=4k, 20 trials", ordered && zero_at_zero,
                fmt("mean loss P1 %.2f pp, P2 %.2f pp, P3 %.2f pp (slack %.0f pp); rate-0 loss exactly 0: %s",
                    100 * loss[1], 100 * loss[2], 100 * loss[3], 100 * kOrderingSlack, zero_at_zero ? "yes" : "no"));
}

DatasetPair proxy(std::size_t classes, std::size_t features, unsigned seed) {
  testing::ClusterSpec spec;
  spec.classes = classes;
  spec.features = features;
  spec.train_per_class = 120;
  spec.test_per_class = 40;
  spec.noise = 2.0;
  spec.seed = seed;
  return testing::make_clusters(spec);
}

}  // namespace

int main(int argc, char** argv) {
  std::string data_dir = MIMHD_DEFAULT_DATA_DIR;
  if (const char* env = std::getenv("MIMHD_DATA_DIR")) data_dir = env;
  int seeds = 3;
  bool run_proxy = false;
  Runner runner;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--data-dir" && i + 1 < argc) {
      data_dir = argv[++i];
    } else if (arg == "--seeds" && i + 1 < argc) {
      seeds = std::atoi(argv[++i]);
    } else if (arg == "--eta" && i + 1 < argc) {
      runner.hwart.eta = std::atof(argv[++i]);
    } else if (arg == "--mcam-beta" && i + 1 < argc) {
      runner.beta = std::atof(argv[++i]);
    } else if (arg == "--proxy") {
      run_proxy = true;
    } else {
      std::fprintf(stderr, "usage: %s [--data-dir DIR] [--seeds N] [--eta X] [--mcam-beta X] [--proxy]\n", argv[0]);
      return 2;
    }
  }

  Report report;
  const auto isolet_src = resolve_dataset("isolet", data_dir);
  const auto ucihar_src = resolve_dataset("ucihar", data_dir);
  const bool have_isolet = files_present(isolet_src);
  const bool have_ucihar = files_present(ucihar_src);
  std::printf("data dir: %s (isolet %s, ucihar %s)\n", data_dir.c_str(), have_isolet ? "present" : "missing",
              have_ucihar ? "present" : "missing");

  try {
    const std::string missing = "benchmark files not found under " + data_dir;
    std::optional<DatasetPair> isolet, ucihar;
    if (have_isolet) isolet = load_dataset(isolet_src);
    if (have_ucihar) ucihar = load_dataset(ucihar_src);
    if (isolet && ucihar) {
      criterion_3(report, runner, {{"ISOLET", &*isolet}, {"UCIHAR", &*ucihar}}, seeds, "");
    } else {
      report.record(3, "precision ordering, ISOLET + UCIHAR", Verdict::blocked, missing);
    }
    if (isolet) {
      criterion_4(report, runner, *isolet, seeds, "");
      criterion_5(report, runner, *isolet, seeds, "");
      criterion_6(report, runner, *isolet, "");
    } else {
      report.record(4, "dimensionality trend, ISOLET P=1", Verdict::blocked, missing);
      report.record(5, "HWART recovery, ISOLET D=4k P=3", Verdict::blocked, missing);
      report.record(6, "robustness ordering, ISOLET 10% flips", Verdict::blocked, missing);
    }

    if (run_proxy) {
      // Informational only: recorded after the verdicts above and excluded
      // from the exit status.
      Report proxy_report;
      Runner proxy_runner;
      proxy_runner.hwart = runner.hwart;
      proxy_runner.beta = runner.beta;
      const auto isolet_like = proxy(26, 617, 1);
      const auto ucihar_like = proxy(6, 561, 2);
      std::printf("--- synthetic proxy (not counted) ---\n");
      criterion_3(proxy_report, proxy_runner, {{"isolet-like", &isolet_like}, {"ucihar-like", &ucihar_like}}, seeds,
                  "PROXY ");
      criterion_4(proxy_report, proxy_runner, isolet_like, seeds, "PROXY ");
      criterion_5(proxy_report, proxy_runner, isolet_like, seeds, "PROXY ");
      criterion_6(proxy_report, proxy_runner, isolet_like, "PROXY ");
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  if (report.any_failed()) return 1;
  return report.all_blocked() ? kSkipExitCode : 0;
}
