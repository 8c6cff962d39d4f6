#include "smilelab/cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "smilelab/error.hpp"

namespace smilelab::cli {

namespace {

double to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    fail(ErrorCode::kConfig, "invalid number '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end) fail(ErrorCode::kConfig, "invalid integer '" + s + "'");
  return v;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(',', start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_commas(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    const int lo = to_int(item.substr(0, dots));
    std::string rest = item.substr(dots + 2);
    int step = 1;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = to_int(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const int hi = to_int(rest);
    if (step < 1 || hi < lo) fail(ErrorCode::kConfig, "invalid range '" + item + "'");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_commas(text)) {
    const auto dots = item.find("..", item.empty() ? 0 : 1);
    if (dots == std::string::npos) {
      out.push_back(to_double(item));
      continue;
    }
    const double lo = to_double(item.substr(0, dots));
    const auto rest = item.substr(dots + 2);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) fail(ErrorCode::kConfig, "real ranges need a step: '" + item + "'");
    const double hi = to_double(rest.substr(0, colon));
    const double step = to_double(rest.substr(colon + 1));
    if (!(step > 0.0) || hi < lo) fail(ErrorCode::kConfig, "invalid range '" + item + "'");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  }
  return out;
}

RunConfig::RunConfig(std::string command, std::vector<OptionSpec> specs)
    : command_(std::move(command)), specs_(std::move(specs)) {}

void RunConfig::attach(CLI::App& sub) {
  sub.add_option("--config", config_path_, "JSON config file; flags override its values");
  sub.add_option("--out-dir", out_dir_, "Directory for output files")->capture_default_str();
  for (const auto& spec : specs_) {
    std::string help = spec.help;
    if (!spec.default_value.is_null()) help += " [default: " + spec.default_value.dump() + "]";
    if (spec.required) help += " (required)";
    options_[spec.name] = sub.add_option("--" + spec.name, raw_[spec.name], help);
  }
}

Json RunConfig::convert(const OptionSpec& spec, const Json& value, const std::string& origin) const {
  const std::string ctx = origin + " " + spec.name;
  try {
    switch (spec.type) {
      case OptionType::kDouble:
        if (value.is_number()) return value.get<double>();
        if (value.is_string()) return to_double(value.get<std::string>());
        break;
      case OptionType::kInt:
        if (value.is_number_integer()) return value.get<int>();
        if (value.is_string()) return to_int(value.get<std::string>());
        break;
      case OptionType::kString:
        if (value.is_string()) return value;
        break;
      case OptionType::kBool:
        if (value.is_boolean()) return value;
        if (value.is_string()) {
          const auto s = value.get<std::string>();
          if (s == "true" || s == "1") return true;
          if (s == "false" || s == "0") return false;
        }
        break;
      case OptionType::kIntList:
        if (value.is_array()) {
          Json out = Json::array();
          for (const auto& v : value) {
            if (!v.is_number_integer()) fail(ErrorCode::kConfig, "expected integers");
            out.push_back(v.get<int>());
          }
          return out;
        }
        if (value.is_number_integer()) return Json::array({value.get<int>()});
        if (value.is_string()) return Json(parse_int_list(value.get<std::string>()));
        break;
      case OptionType::kDoubleList:
        if (value.is_array()) {
          Json out = Json::array();
          for (const auto& v : value) {
            if (!v.is_number()) fail(ErrorCode::kConfig, "expected numbers");
            out.push_back(v.get<double>());
          }
          return out;
        }
        if (value.is_number()) return Json::array({value.get<double>()});
        if (value.is_string()) return Json(parse_double_list(value.get<std::string>()));
        break;
    }
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, e.what(), ctx);
  }
  fail(ErrorCode::kConfig, "value has the wrong type", ctx + " = " + value.dump());
}

void RunConfig::resolve() {
  std::map<std::string, Json> values;
  for (const auto& spec : specs_) {
    if (!spec.default_value.is_null()) values[spec.name] = convert(spec, spec.default_value, "default");
  }

  if (!config_path_.empty()) {
    std::ifstream in(config_path_);
    if (!in) fail(ErrorCode::kIo, "cannot open config file", config_path_);
    Json file;
    try {
      file = Json::parse(in);
    } catch (const std::exception& e) {
      fail(ErrorCode::kConfig, "config file is not valid JSON", config_path_ + ": " + e.what());
    }
    if (!file.is_object()) fail(ErrorCode::kConfig, "config file must hold a JSON object", config_path_);
    static const std::set<std::string> kCommands{"smile", "ssr", "simulate", "analyze",
                                                 "mc-verify", "calibrate", "report"};
    auto apply = [&](const Json& obj, const std::string& origin) {
      for (const auto& [key, value] : obj.items()) {
        if (kCommands.count(key) != 0 && value.is_object()) continue;
        const auto it = std::find_if(specs_.begin(), specs_.end(),
                                     [&](const OptionSpec& s) { return s.name == key; });
        if (it == specs_.end()) {
          fail(ErrorCode::kConfig, "unknown key for '" + command_ + "'", origin + ": " + key);
        }
        values[key] = convert(*it, value, origin);
      }
    };
    apply(file, config_path_);
    if (file.contains(command_) && file[command_].is_object()) {
      apply(file[command_], config_path_ + "[" + command_ + "]");
    }
  }

  for (const auto& spec : specs_) {
    if (options_.count(spec.name) != 0 && options_.at(spec.name)->count() > 0) {
      values[spec.name] = convert(spec, Json(raw_.at(spec.name)), "--");
    }
  }

  resolved_ = Json::object();
  for (const auto& spec : specs_) {
    const auto it = values.find(spec.name);
    if (it == values.end()) {
      if (spec.required) fail(ErrorCode::kConfig, "missing required option --" + spec.name, command_);
      continue;
    }
    resolved_[spec.name] = it->second;
  }
}

bool RunConfig::has(const std::string& name) const { return resolved_.contains(name); }

double RunConfig::get_double(const std::string& name) const { return resolved_.at(name).get<double>(); }
int RunConfig::get_int(const std::string& name) const { return resolved_.at(name).get<int>(); }
std::string RunConfig::get_string(const std::string& name) const {
  return resolved_.at(name).get<std::string>();
}
bool RunConfig::get_bool(const std::string& name) const { return resolved_.at(name).get<bool>(); }
std::vector<int> RunConfig::get_int_list(const std::string& name) const {
  return resolved_.at(name).get<std::vector<int>>();
}
std::vector<double> RunConfig::get_double_list(const std::string& name) const {
  return resolved_.at(name).get<std::vector<double>>();
}

}  // namespace smilelab::cli
