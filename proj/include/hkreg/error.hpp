#pragma once

#include <stdexcept>
#include <string>

namespace hkreg {

enum class ErrorCode {
  InvalidArgument,
  InvalidTime,
  OutOfDomain,
  SidelengthMismatch,
  EmptyDataset,
  DegeneratePredictors,
  NoConvergence,
  Parse,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; the code distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hkreg
