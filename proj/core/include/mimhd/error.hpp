#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mimhd {

enum class ErrorKind {
  invalid_range,
  invalid_dimension,
  invalid_config,
  invalid_input,
  invalid_mismatch,
  invalid_model,
  invalid_label,
  shape,
  undefined_similarity,
  parse,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every library failure surfaces as an Error carrying a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Non-fatal diagnostics (empty classes, partial tiles). Defaults to stderr.
using WarningSink = std::function<void(std::string_view)>;

void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace mimhd
