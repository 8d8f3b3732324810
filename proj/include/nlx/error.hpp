#pragma once

#include <stdexcept>
#include <string>

namespace nlx {

// Error categories. Each maps onto one C API status code.
enum class ErrorCode {
  kInvalidArgument,
  kDomain,
  kEncoding,
  kParse,
  kIo,
  kNumeric,
  kChecksum,
  kTruncated,
  kVersion,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nlx
