#pragma once

// Key/value text configuration shared by the CLI and experiment drivers.
//
//   # comment
//   dim = 1000, 2000, 4000
//   dataset.isolet.train = /data/isolet1+2+3+4.data
//
// One `key = value` per line; `#` at the start of a line or after whitespace
// begins a comment; surrounding whitespace is trimmed; keys are
// case-sensitive; a later duplicate overrides an earlier one. List values
// are comma separated.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mimhd {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  // Throws parse (with line number) on a line without '=' or an empty key.
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  [[nodiscard]] bool contains(const std::string& key) const { return values_.contains(key); }
  [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
  [[nodiscard]] const std::map<std::string, std::string>& entries() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

[[nodiscard]] std::string trim(std::string_view s);
[[nodiscard]] std::vector<std::string> split_list(std::string_view s, char sep = ',');

}  // namespace mimhd
