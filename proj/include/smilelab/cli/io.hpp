#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "smilelab/estimators.hpp"

namespace smilelab::cli {

enum class ReturnsFormat { kAuto, kClose, kReturn };

/// CSV with header `date,close` (log-returns computed) or `date,return`.
/// Lines starting with '#' before the header are skipped.
ReturnSeries load_returns(const std::string& path, ReturnsFormat format = ReturnsFormat::kAuto);
/// Writes `date,return`; digits = 17 round-trips every double exactly.
void save_returns(const std::string& path, const ReturnSeries& series, int digits = 17,
                  const std::vector<std::string>& comments = {});

/// CSV with header `date,maturity_days,moneyness,implied_vol`, grouped by date then maturity.
std::vector<SmileSurface> load_surface(const std::string& path);
void save_surface(const std::string& path, const std::vector<SmileSurface>& surfaces,
                  int digits = 12, const std::vector<std::string>& comments = {});

Date parse_date(std::string_view text);
std::string format_date(const Date& date);
/// Next weekday strictly after `date`.
Date next_business_day(const Date& date);

/// "{:.Ng}" formatting; NaN prints as "nan".
std::string format_number(double value, int digits = 12);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

/// Writes text atomically enough for our purposes: to path.tmp, then renamed.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace smilelab::cli
