#pragma once

#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace smilelab::cli {

using Json = nlohmann::ordered_json;

enum class OptionType { kDouble, kInt, kString, kBool, kIntList, kDoubleList };

struct OptionSpec {
  std::string name;  // flag is --name, config key is "name"
  OptionType type = OptionType::kDouble;
  Json default_value;  // null = no default
  std::string help;
  bool required = false;
};

/// Options of one subcommand. Values resolve as default < config file < flag.
class RunConfig {
 public:
  RunConfig(std::string command, std::vector<OptionSpec> specs);

  /// Adds --config, --out-dir and one --name option per spec.
  void attach(CLI::App& sub);
  /// Applies the config file and given flags; throws kConfig on bad values or keys.
  void resolve();

  const std::string& command() const noexcept { return command_; }
  /// Typed values keyed by option name, in declaration order.
  const Json& resolved() const noexcept { return resolved_; }
  const std::string& out_dir() const noexcept { return out_dir_; }
  bool has(const std::string& name) const;

  double get_double(const std::string& name) const;
  int get_int(const std::string& name) const;
  std::string get_string(const std::string& name) const;
  bool get_bool(const std::string& name) const;
  std::vector<int> get_int_list(const std::string& name) const;
  std::vector<double> get_double_list(const std::string& name) const;

 private:
  Json convert(const OptionSpec& spec, const Json& value, const std::string& origin) const;

  std::string command_;
  std::vector<OptionSpec> specs_;
  std::map<std::string, std::string> raw_;
  std::map<std::string, CLI::Option*> options_;
  std::string config_path_;
  std::string out_dir_ = ".";
  Json resolved_ = Json::object();
};

/// "20,40,60", "2..250" or "2..250:4" (start..stop:step, inclusive).
std::vector<int> parse_int_list(const std::string& text);
/// "-1,-0.5,0,0.5,1" or "-1..1:0.25".
std::vector<double> parse_double_list(const std::string& text);

}  // namespace smilelab::cli
