#include "smilelab/cli/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "smilelab/error.hpp"

namespace smilelab::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

double parse_double(std::string_view text, const std::string& path, std::size_t line) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    fail(ErrorCode::kParse, "invalid number '" + std::string(text) + "'", where(path, line));
  }
  return value;
}

int parse_int(std::string_view text, const std::string& path, std::size_t line) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    fail(ErrorCode::kParse, "invalid integer '" + std::string(text) + "'", where(path, line));
  }
  return value;
}

struct CsvFile {
  std::string header;
  std::size_t header_line = 0;
  std::vector<std::pair<std::size_t, std::string>> rows;  // (line number, text)
};

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open file", path);
  CsvFile out;
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (!have_header) {
      if (t.empty() || t.front() == '#') continue;
      out.header = std::string(t);
      out.header_line = n;
      have_header = true;
      continue;
    }
    if (t.empty()) continue;
    out.rows.emplace_back(n, std::string(t));
  }
  if (!have_header) fail(ErrorCode::kParse, "file has no header", path);
  return out;
}

std::string with_comments(const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  return out;
}

}  // namespace

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  const std::string s(text);
  if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    fail(ErrorCode::kParse, "dates must be ISO-8601 YYYY-MM-DD", s);
  }
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) fail(ErrorCode::kParse, "invalid calendar date", s);
  return date;
}

std::string format_date(const Date& date) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                     static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

Date next_business_day(const Date& date) {
  auto day = std::chrono::sys_days(date) + std::chrono::days{1};
  while (std::chrono::weekday(day) == std::chrono::Saturday ||
         std::chrono::weekday(day) == std::chrono::Sunday) {
    day += std::chrono::days{1};
  }
  return Date(day);
}

std::string format_number(double value, int digits) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{:.{}g}", value, digits);
}

ReturnSeries load_returns(const std::string& path, ReturnsFormat format) {
  const auto csv = read_csv(path);
  ReturnsFormat kind;
  if (csv.header == "date,close") {
    kind = ReturnsFormat::kClose;
  } else if (csv.header == "date,return") {
    kind = ReturnsFormat::kReturn;
  } else {
    fail(ErrorCode::kParse, "expected header 'date,close' or 'date,return'",
         where(path, csv.header_line) + " got '" + csv.header + "'");
  }
  if (format != ReturnsFormat::kAuto && format != kind) {
    fail(ErrorCode::kParse, "header does not match the requested format", where(path, csv.header_line));
  }

  std::vector<Date> dates;
  std::vector<double> values;
  dates.reserve(csv.rows.size());
  values.reserve(csv.rows.size());
  std::string violations;
  std::size_t n_violations = 0;
  for (const auto& [line, text] : csv.rows) {
    const auto fields = split(text);
    if (fields.size() != 2) fail(ErrorCode::kParse, "expected 2 columns", where(path, line));
    Date date;
    try {
      date = parse_date(fields[0]);
    } catch (const Error& e) {
      fail(ErrorCode::kParse, e.what(), where(path, line) + " '" + std::string(fields[0]) + "'");
    }
    const double value = parse_double(fields[1], path, line);
    if (!std::isfinite(value)) fail(ErrorCode::kParse, "non-finite value", where(path, line));
    if (kind == ReturnsFormat::kClose && !(value > 0.0)) {
      fail(ErrorCode::kValidation, "closes must be positive", where(path, line));
    }
    if (!dates.empty()) {
      if (date == dates.back()) {
        fail(ErrorCode::kValidation, "duplicate date " + format_date(date), where(path, line));
      }
      if (date < dates.back()) {
        if (n_violations < 20) {
          violations += (violations.empty() ? "" : "; ") + where(path, line) + " " + format_date(date) +
                        " after " + format_date(dates.back());
        }
        ++n_violations;
      }
    }
    dates.push_back(date);
    values.push_back(value);
  }
  if (n_violations > 0) {
    fail(ErrorCode::kValidation,
         "dates are not increasing (" + std::to_string(n_violations) + " violations)", violations);
  }

  ReturnSeries series;
  if (kind == ReturnsFormat::kClose) {
    if (values.size() < 3) fail(ErrorCode::kInsufficientData, "need at least 3 closes", path);
    series.closes = values;
    for (std::size_t i = 1; i < values.size(); ++i) {
      series.dates.push_back(dates[i]);
      series.returns.push_back(std::log(values[i] / values[i - 1]));
    }
  } else {
    series.dates = std::move(dates);
    series.returns = std::move(values);
  }
  series.validate();
  return series;
}

void save_returns(const std::string& path, const ReturnSeries& series, int digits,
                  const std::vector<std::string>& comments) {
  std::string out = with_comments(comments);
  out += "date,return\n";
  for (std::size_t i = 0; i < series.returns.size(); ++i) {
    out += format_date(series.dates[i]);
    out += ',';
    out += format_number(series.returns[i], digits);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<SmileSurface> load_surface(const std::string& path) {
  const auto csv = read_csv(path);
  if (csv.header != "date,maturity_days,moneyness,implied_vol") {
    fail(ErrorCode::kParse, "expected header 'date,maturity_days,moneyness,implied_vol'",
         where(path, csv.header_line) + " got '" + csv.header + "'");
  }
  std::map<Date, std::map<int, std::vector<SmileQuote>>> grouped;
  for (const auto& [line, text] : csv.rows) {
    const auto fields = split(text);
    if (fields.size() != 4) fail(ErrorCode::kParse, "expected 4 columns", where(path, line));
    Date date;
    try {
      date = parse_date(fields[0]);
    } catch (const Error& e) {
      fail(ErrorCode::kParse, e.what(), where(path, line));
    }
    const int maturity = parse_int(fields[1], path, line);
    const double m = parse_double(fields[2], path, line);
    const double vol = parse_double(fields[3], path, line);
    if (maturity < 1) fail(ErrorCode::kValidation, "maturity must be positive", where(path, line));
    if (!std::isfinite(m)) fail(ErrorCode::kValidation, "moneyness must be finite", where(path, line));
    if (!(vol > 0.0) || !std::isfinite(vol)) {
      fail(ErrorCode::kValidation, "implied vol must be positive", where(path, line));
    }
    grouped[date][maturity].push_back({m, vol});
  }
  if (grouped.empty()) fail(ErrorCode::kInsufficientData, "surface file has no rows", path);

  std::vector<SmileSurface> out;
  for (auto& [date, by_maturity] : grouped) {
    SmileSurface s;
    s.date = date;
    for (auto& [maturity, quotes] : by_maturity) s.slices.push_back({maturity, std::move(quotes)});
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

void save_surface(const std::string& path, const std::vector<SmileSurface>& surfaces, int digits,
                  const std::vector<std::string>& comments) {
  std::string out = with_comments(comments);
  out += "date,maturity_days,moneyness,implied_vol\n";
  for (const auto& s : surfaces) {
    const auto date = format_date(s.date);
    for (const auto& slice : s.slices) {
      for (const auto& q : slice.quotes) {
        out += fmt::format("{},{},{},{}\n", date, slice.maturity_days, format_number(q.moneyness, digits),
                           format_number(q.implied_vol, digits));
      }
    }
  }
  write_text_file(path, out);
}

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open file", path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write file", path);
    out << text;
    if (!out) fail(ErrorCode::kIo, "write failed", path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, "cannot move output into place", path + ": " + ec.message());
}

}  // namespace smilelab::cli
