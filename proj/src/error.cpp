#include "smilelab/error.hpp"

namespace smilelab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDomain: return "domain_error";
    case ErrorCode::kNoArbitrage: return "no_arbitrage_violation";
    case ErrorCode::kNumerical: return "numerical_error";
    case ErrorCode::kRange: return "range_error";
    case ErrorCode::kDegenerate: return "degenerate_model";
    case ErrorCode::kVolOfVolTooLarge: return "vol_of_vol_too_large";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kInsignificant: return "insignificant_estimate";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kConfig: return "config_error";
  }
  return "unknown_error";
}

}  // namespace smilelab
