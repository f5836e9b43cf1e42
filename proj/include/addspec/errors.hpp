#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace addspec {

using Json = nlohmann::ordered_json;

// Error classes mirror the C API status codes.  "hypothesis" covers every
// violated mathematical precondition (unstable growth, bad permutation window,
// exhausted selection interval, ...): an expected, reportable outcome rather
// than a bug.
enum class ErrorCode {
  invalid_argument,
  domain,
  range,
  hypothesis,
  capacity,
  nonconvergence,
  internal,
};

class AsError : public std::runtime_error {
 public:
  AsError(ErrorCode code, std::string message, nlohmann::ordered_json detail = {})
      : std::runtime_error(std::move(message)), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const { return code_; }
  const nlohmann::ordered_json& detail() const { return detail_; }

  // Precondition-class failures map to CLI exit code 2; the rest to 1.
  bool is_precondition() const {
    return code_ == ErrorCode::hypothesis || code_ == ErrorCode::domain ||
           code_ == ErrorCode::range;
  }

 private:
  ErrorCode code_;
  nlohmann::ordered_json detail_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::domain: return "domain";
    case ErrorCode::range: return "range";
    case ErrorCode::hypothesis: return "hypothesis";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::nonconvergence: return "nonconvergence";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace addspec
