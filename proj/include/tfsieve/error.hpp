#pragma once

#include <stdexcept>
#include <string>

namespace tfsieve {

enum class ErrorCode {
  DomainError,
  AxisMismatch,
  AliasingRisk,
  GridMismatch,
  TruncationRisk,
  PatchOutsideGrid,
  DegenerateConstant,
  SingularSystem,
  IndexOutOfRange,
  PointOutsideWindow,
  ZeroSignal,
  NonHermitian,
  InvalidInput,
  Io,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tfsieve
