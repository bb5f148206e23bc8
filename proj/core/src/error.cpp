#include "mimhd/error.hpp"

#include <iostream>
#include <mutex>

namespace mimhd {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_range: return "invalid-range";
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_mismatch: return "invalid-mismatch";
    case ErrorKind::invalid_model: return "invalid-model";
    case ErrorKind::invalid_label: return "invalid-label";
    case ErrorKind::shape: return "shape";
    case ErrorKind::undefined_similarity: return "undefined-similarity";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink_slot() {
  static WarningSink sink;
  return sink;
}

}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  sink_slot() = std::move(sink);
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink_slot()) {
    sink_slot()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace mimhd
