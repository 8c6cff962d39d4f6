#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smilelab {

enum class ErrorCode {
  kDomain,
  kNoArbitrage,
  kNumerical,
  kRange,
  kDegenerate,
  kVolOfVolTooLarge,
  kInsufficientData,
  kInsignificant,
  kParse,
  kValidation,
  kIo,
  kConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library. The code maps onto the CLI's JSON
// error schema {code, message, context}.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string context = {})
      : std::runtime_error(message), code_(code), context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorCode code_;
  std::string context_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message,
                              std::string context = {}) {
  throw Error(code, message, std::move(context));
}

}  // namespace smilelab
