#include "mimhd/datasets.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "mimhd/error.hpp"

namespace mimhd {

namespace fs = std::filesystem;

std::vector<int> Dataset::classes() const {
  std::vector<int> out(labels);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Dataset::validate() const {
  if (features == 0 && !labels.empty()) throw Error(ErrorKind::shape, "dataset rows have no features");
  if (values.size() != labels.size() * features) {
    throw Error(ErrorKind::shape, "feature matrix has " + std::to_string(values.size()) + " values for " +
                                      std::to_string(labels.size()) + " labels x " + std::to_string(features) +
                                      " features");
  }
}

namespace {

std::vector<unsigned char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::uint32_t be32(const std::vector<unsigned char>& bytes, std::size_t offset, const fs::path& path) {
  if (bytes.size() < offset + 4) {
    throw Error(ErrorKind::parse, path.string() + ": truncated IDX header at byte offset " + std::to_string(offset));
  }
  return (std::uint32_t{bytes[offset]} << 24U) | (std::uint32_t{bytes[offset + 1]} << 16U) |
         (std::uint32_t{bytes[offset + 2]} << 8U) | std::uint32_t{bytes[offset + 3]};
}

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_label(std::string_view field, int& out) {
  double v = 0.0;
  if (!parse_double(field, v)) return false;
  if (v != std::floor(v) || v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) return false;
  out = static_cast<int>(v);
  return true;
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  auto trim_view = [](std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return std::string_view{};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  if (delimiter == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      fields.push_back(line.substr(i, j - i));
      i = j;
    }
    return fields;
  }
  std::size_t start = 0;
  for (;;) {
    const auto end = line.find(delimiter, start);
    fields.push_back(trim_view(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

struct Table {
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> line_numbers;
  std::string text;  // owns the views
};

Table read_table(const fs::path& path, char delimiter) {
  Table t;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  t.text = ss.str();
  std::string_view all(t.text);
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < all.size()) {
    auto end = all.find('\n', start);
    if (end == std::string_view::npos) end = all.size();
    ++line_no;
    const auto line = all.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    t.rows.push_back(split_fields(line, delimiter));
    t.line_numbers.push_back(line_no);
  }
  return t;
}

std::size_t resolve_column(int column, std::size_t width, const fs::path& path) {
  const long long idx = column < 0 ? static_cast<long long>(width) + column : column;
  if (idx < 0 || idx >= static_cast<long long>(width)) {
    throw Error(ErrorKind::invalid_config, path.string() + ": label column " + std::to_string(column) +
                                               " outside a " + std::to_string(width) + "-column table");
  }
  return static_cast<std::size_t>(idx);
}

bool looks_like_header(const std::vector<std::string_view>& fields) {
  double v = 0.0;
  return std::any_of(fields.begin(), fields.end(), [&v](std::string_view f) { return !parse_double(f, v); });
}

std::string where(const fs::path& path, std::size_t line, std::size_t column) {
  return path.string() + ": line " + std::to_string(line) + ", column " + std::to_string(column + 1);
}

}  // namespace

Dataset load_idx(const fs::path& images, const fs::path& labels, Split split) {
  const auto img = read_file(images);
  const auto lab = read_file(labels);

  if (be32(img, 0, images) != kIdxImagesMagic) {
    throw Error(ErrorKind::parse, images.string() + ": bad IDX image magic at byte offset 0");
  }
  const std::size_t count = be32(img, 4, images);
  const std::size_t rows = be32(img, 8, images);
  const std::size_t cols = be32(img, 12, images);
  const std::size_t features = rows * cols;
  if (features == 0) throw Error(ErrorKind::parse, images.string() + ": zero-sized images at byte offset 8");
  if (img.size() < 16 + count * features) {
    throw Error(ErrorKind::parse, images.string() + ": truncated pixel data at byte offset " +
                                      std::to_string(img.size()) + " (expected " +
                                      std::to_string(16 + count * features) + " bytes)");
  }

  if (be32(lab, 0, labels) != kIdxLabelsMagic) {
    throw Error(ErrorKind::parse, labels.string() + ": bad IDX label magic at byte offset 0");
  }
  const std::size_t label_count = be32(lab, 4, labels);
  if (label_count != count) {
    throw Error(ErrorKind::parse, labels.string() + ": label count " + std::to_string(label_count) +
                                      " at byte offset 4 differs from image count " + std::to_string(count));
  }
  if (lab.size() < 8 + count) {
    throw Error(ErrorKind::parse, labels.string() + ": truncated label data at byte offset " +
                                      std::to_string(lab.size()));
  }

  Dataset ds;
  ds.name = images.stem().string();
  ds.split = split;
  ds.features = features;
  ds.values.resize(count * features);
  for (std::size_t i = 0; i < ds.values.size(); ++i) ds.values[i] = static_cast<double>(img[16 + i]);
  ds.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) ds.labels[i] = static_cast<int>(lab[8 + i]);
  return ds;
}

Dataset load_csv(const fs::path& path, const CsvOptions& options, Split split) {
  const Table t = read_table(path, options.delimiter);
  if (t.rows.empty()) throw Error(ErrorKind::parse, path.string() + ": no data rows");

  std::size_t first = 0;
  const bool header = options.header == HeaderMode::present ||
                      (options.header == HeaderMode::auto_detect && looks_like_header(t.rows.front()));
  if (header) first = 1;
  if (first >= t.rows.size()) throw Error(ErrorKind::parse, path.string() + ": header without data rows");

  const std::size_t width = t.rows[first].size();
  if (width < 2) throw Error(ErrorKind::parse, path.string() + ": need at least one feature and one label column");
  const std::size_t label_col = resolve_column(options.label_column, width, path);

  Dataset ds;
  ds.name = path.stem().string();
  ds.split = split;
  ds.features = width - 1;
  ds.values.reserve((t.rows.size() - first) * ds.features);
  for (std::size_t r = first; r < t.rows.size(); ++r) {
    const auto& fields = t.rows[r];
    const std::size_t line = t.line_numbers[r];
    if (fields.size() != width) {
      throw Error(ErrorKind::parse, path.string() + ": line " + std::to_string(line) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) {
        int label = 0;
        if (!parse_label(fields[c], label)) {
          throw Error(ErrorKind::parse, where(path, line, c) + ": label '" + std::string(fields[c]) + "' is not an integer");
        }
        ds.labels.push_back(label);
      } else {
        double v = 0.0;
        if (!parse_double(fields[c], v)) {
          throw Error(ErrorKind::parse, where(path, line, c) + ": '" + std::string(fields[c]) + "' is not numeric");
        }
        ds.values.push_back(v);
      }
    }
  }
  ds.validate();
  return ds;
}

Dataset load_feature_label_files(const fs::path& features, const fs::path& labels, const CsvOptions& options,
                                 Split split) {
  const Table x = read_table(features, options.delimiter);
  const Table y = read_table(labels, options.delimiter);
  if (x.rows.empty()) throw Error(ErrorKind::parse, features.string() + ": no data rows");
  if (x.rows.size() != y.rows.size()) {
    throw Error(ErrorKind::parse, labels.string() + ": " + std::to_string(y.rows.size()) + " labels for " +
                                      std::to_string(x.rows.size()) + " feature rows");
  }
  Dataset ds;
  ds.name = features.stem().string();
  ds.split = split;
  ds.features = x.rows.front().size();
  ds.values.reserve(x.rows.size() * ds.features);
  for (std::size_t r = 0; r < x.rows.size(); ++r) {
    const auto& fields = x.rows[r];
    if (fields.size() != ds.features) {
      throw Error(ErrorKind::parse, features.string() + ": line " + std::to_string(x.line_numbers[r]) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(ds.features));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw Error(ErrorKind::parse, where(features, x.line_numbers[r], c) + ": '" + std::string(fields[c]) +
                                          "' is not numeric");
      }
      ds.values.push_back(v);
    }
    int label = 0;
    if (y.rows[r].size() != 1 || !parse_label(y.rows[r][0], label)) {
      throw Error(ErrorKind::parse, labels.string() + ": line " + std::to_string(y.line_numbers[r]) +
                                        " is not a single integer label");
    }
    ds.labels.push_back(label);
  }
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const fs::path& path, char delimiter) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  std::array<char, 64> buf{};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.row(i)) {
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      out.write(buf.data(), res.ptr - buf.data());
      out.put(delimiter);
    }
    out << ds.labels[i] << '\n';
  }
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

FeatureQuantizer normalize(const Dataset& train, int levels) {
  train.validate();
  if (train.size() == 0) throw Error(ErrorKind::invalid_input, "normalization needs a nonempty training split");
  std::vector<double> lo(train.row(0).begin(), train.row(0).end());
  std::vector<double> hi(lo);
  for (std::size_t i = 1; i < train.size(); ++i) {
    const auto row = train.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      lo[k] = std::min(lo[k], row[k]);
      hi[k] = std::max(hi[k], row[k]);
    }
  }
  return FeatureQuantizer(std::move(lo), std::move(hi), levels);
}

std::vector<fs::path> DatasetSource::files() const {
  std::vector<fs::path> out{train, test};
  if (format != DatasetFormat::csv) {
    out.push_back(train_labels);
    out.push_back(test_labels);
  }
  return out;
}

namespace {

DatasetFormat parse_format(const std::string& s) {
  if (s == "idx") return DatasetFormat::idx;
  if (s == "csv") return DatasetFormat::csv;
  if (s == "split" || s == "split_files") return DatasetFormat::split_files;
  throw Error(ErrorKind::invalid_config, "unknown dataset format '" + s + "'");
}

char parse_delimiter(const std::string& s) {
  if (s == "space" || s == "whitespace") return ' ';
  if (s == "tab") return '\t';
  if (s == "comma") return ',';
  if (s.size() == 1) return s.front();
  throw Error(ErrorKind::invalid_config, "unsupported delimiter '" + s + "'");
}

HeaderMode parse_header(const std::string& s) {
  if (s == "auto") return HeaderMode::auto_detect;
  if (s == "yes" || s == "true") return HeaderMode::present;
  if (s == "no" || s == "false") return HeaderMode::absent;
  throw Error(ErrorKind::invalid_config, "header must be auto, yes or no");
}

}  // namespace

DatasetSource resolve_dataset(const std::string& name, const fs::path& data_dir, const KeyValueConfig& overrides) {
  DatasetSource src;
  src.name = name;
  bool known = true;
  if (name == "mnist") {
    src.format = DatasetFormat::idx;
    src.train = "mnist/train-images-idx3-ubyte";
    src.train_labels = "mnist/train-labels-idx1-ubyte";
    src.test = "mnist/t10k-images-idx3-ubyte";
    src.test_labels = "mnist/t10k-labels-idx1-ubyte";
  } else if (name == "isolet") {
    src.format = DatasetFormat::csv;
    src.train = "isolet/isolet1+2+3+4.data";
    src.test = "isolet/isolet5.data";
    src.csv = CsvOptions{',', -1, HeaderMode::absent};
  } else if (name == "ucihar") {
    src.format = DatasetFormat::split_files;
    src.train = "ucihar/X_train.txt";
    src.train_labels = "ucihar/y_train.txt";
    src.test = "ucihar/X_test.txt";
    src.test_labels = "ucihar/y_test.txt";
    src.csv = CsvOptions{' ', -1, HeaderMode::absent};
  } else {
    known = false;
  }

  const std::string prefix = "dataset." + name + ".";
  auto opt = [&](const char* key) { return overrides.get(prefix + key); };
  if (auto v = opt("format")) src.format = parse_format(*v);
  if (auto v = opt("train")) src.train = *v;
  if (auto v = opt("test")) src.test = *v;
  if (auto v = opt("train_labels")) src.train_labels = *v;
  if (auto v = opt("test_labels")) src.test_labels = *v;
  if (auto v = opt("label_column")) {
    int column = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), column);
    if (ec != std::errc() || ptr != v->data() + v->size()) {
      throw Error(ErrorKind::invalid_config, prefix + "label_column must be an integer");
    }
    src.csv.label_column = column;
  }
  if (auto v = opt("delimiter")) src.csv.delimiter = parse_delimiter(*v);
  if (auto v = opt("header")) src.csv.header = parse_header(*v);

  if (!known && (src.train.empty() || src.test.empty())) {
    throw Error(ErrorKind::invalid_config, "dataset '" + name + "' is not built in; set " + prefix + "train and " +
                                               prefix + "test");
  }
  auto anchor = [&data_dir](fs::path& p) {
    if (!p.empty() && p.is_relative()) p = data_dir / p;
  };
  anchor(src.train);
  anchor(src.test);
  anchor(src.train_labels);
  anchor(src.test_labels);
  return src;
}

bool files_present(const DatasetSource& source) {
  const auto files = source.files();
  return std::all_of(files.begin(), files.end(), [](const fs::path& p) { return !p.empty() && fs::is_regular_file(p); });
}

void require_files(const DatasetSource& source) {
  std::string missing;
  for (const auto& p : source.files()) {
    if (p.empty() || !fs::is_regular_file(p)) missing += (missing.empty() ? "" : ", ") + p.string();
  }
  if (!missing.empty()) {
    throw Error(ErrorKind::io, "dataset '" + source.name + "' is missing files: " + missing);
  }
}

DatasetPair load_dataset(const DatasetSource& source) {
  require_files(source);
  DatasetPair pair;
  switch (source.format) {
    case DatasetFormat::idx:
      pair.train = load_idx(source.train, source.train_labels, Split::train);
      pair.test = load_idx(source.test, source.test_labels, Split::test);
      break;
    case DatasetFormat::csv:
      pair.train = load_csv(source.train, source.csv, Split::train);
      pair.test = load_csv(source.test, source.csv, Split::test);
      break;
    case DatasetFormat::split_files:
      pair.train = load_feature_label_files(source.train, source.train_labels, source.csv, Split::train);
      pair.test = load_feature_label_files(source.test, source.test_labels, source.csv, Split::test);
      break;
  }
  if (pair.train.features != pair.test.features) {
    throw Error(ErrorKind::shape, "dataset '" + source.name + "' train/test feature counts differ");
  }
  pair.train.name = source.name;
  pair.test.name = source.name;
  return pair;
}

}  // namespace mimhd
