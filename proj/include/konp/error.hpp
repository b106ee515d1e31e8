#pragma once

#include <stdexcept>
#include <string>

namespace konp {

enum class ErrorCode {
  missing_column,
  non_numeric_time,
  negative_time,
  bad_status,
  too_few_groups,
  empty_input,
  no_events,
  length_mismatch,
  invalid_argument,
  parse_error,
  io_failure,
};

const char* to_string(ErrorCode code);

/// Input that violates a documented precondition. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// File-system failure. Maps to CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace konp
