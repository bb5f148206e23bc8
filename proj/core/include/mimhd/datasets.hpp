#pragma once

// Dataset ingestion (IDX, delimited text), train-split feature bounds, and
// the named dataset registry used by the CLI.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mimhd/config.hpp"
#include "mimhd/encoder.hpp"

namespace mimhd {

enum class Split { train, test };

struct Dataset {
  std::string name;
  Split split = Split::train;
  std::size_t features = 0;
  std::vector<double> values;  // row-major, size() * features
  std::vector<int> labels;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] FeatureRows rows() const noexcept { return FeatureRows{values, features}; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const { return rows().row(i); }
  // Distinct labels, ascending.
  [[nodiscard]] std::vector<int> classes() const;
  // Throws shape when the matrix and label counts disagree.
  void validate() const;
};

// IDX image/label pair (big-endian header, magic 0x00000803 / 0x00000801).
// Images are flattened to rows*cols reals in [0, 255]. Throws parse with the
// byte offset of the problem; no partial dataset is returned.
[[nodiscard]] Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                               Split split = Split::train);

enum class HeaderMode { auto_detect, present, absent };

struct CsvOptions {
  // ' ' means "any run of spaces/tabs" (whitespace-aligned text exports).
  char delimiter = ',';
  // Negative counts from the end; -1 is the last column.
  int label_column = -1;
  HeaderMode header = HeaderMode::auto_detect;
};

// Labels must be integral numbers ("3", "3.", "3.0"). Throws parse with the
// line number on ragged rows or non-numeric fields.
[[nodiscard]] Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {},
                               Split split = Split::train);

// Features and labels in separate files (X_train.txt / y_train.txt layout).
[[nodiscard]] Dataset load_feature_label_files(const std::filesystem::path& features,
                                               const std::filesystem::path& labels, const CsvOptions& options,
                                               Split split = Split::train);

// Writes features then the label as the last column, shortest round-trip
// decimal form, so load_csv reproduces the values exactly.
void save_csv(const Dataset& ds, const std::filesystem::path& path, char delimiter = ',');

// Per-feature min/max over the training split only. Constant features get
// lo == hi and always map to level 0; test values outside the bounds clamp.
[[nodiscard]] FeatureQuantizer normalize(const Dataset& train, int levels = EncoderConfig::kDefaultLevels);

enum class DatasetFormat { idx, csv, split_files };

struct DatasetSource {
  std::string name;
  DatasetFormat format = DatasetFormat::csv;
  std::filesystem::path train;
  std::filesystem::path test;
  std::filesystem::path train_labels;  // idx / split_files only
  std::filesystem::path test_labels;
  CsvOptions csv;

  [[nodiscard]] std::vector<std::filesystem::path> files() const;
};

struct DatasetPair {
  Dataset train;
  Dataset test;
};

// Built-in layouts under data_dir:
//   mnist : mnist/{train-images-idx3-ubyte, train-labels-idx1-ubyte,
//                  t10k-images-idx3-ubyte, t10k-labels-idx1-ubyte}
//   isolet: isolet/{isolet1+2+3+4.data, isolet5.data}  (comma separated)
//   ucihar: ucihar/{X_train.txt, y_train.txt, X_test.txt, y_test.txt}
// Config keys dataset.<name>.{format,train,test,train_labels,test_labels,
// label_column,delimiter,header} override or define any source; relative
// paths resolve against data_dir.
[[nodiscard]] DatasetSource resolve_dataset(const std::string& name, const std::filesystem::path& data_dir,
                                            const KeyValueConfig& overrides = {});

// Throws io naming every missing file.
void require_files(const DatasetSource& source);
[[nodiscard]] bool files_present(const DatasetSource& source);

[[nodiscard]] DatasetPair load_dataset(const DatasetSource& source);

}  // namespace mimhd
