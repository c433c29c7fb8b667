#include "vsamem/error.hpp"

#include <atomic>
#include <iostream>

namespace vsamem {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::UnsupportedQuery: return "unsupported-query";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::ConfigError: return "config-error";
  }
  return "error";
}

namespace {
void stderr_sink(const std::string& message) {
  std::cerr << "vsamem: warning: " << message << '\n';
}
std::atomic<WarningSink> g_sink{&stderr_sink};
}  // namespace

void set_warning_sink(WarningSink sink) { g_sink.store(sink ? sink : &stderr_sink); }

void warn(const std::string& message) { g_sink.load()(message); }

}  // namespace vsamem
