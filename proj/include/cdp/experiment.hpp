#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cdp {

inline constexpr const char* kFormatVersion = "cdperc/1";

struct OptionSpec {
  std::string name;           // snake_case key; the CLI flag uses dashes
  std::string default_value;  // textual default, "" for none
  std::string help;
  bool flag = false;  // boolean switch
};

struct ActionSpec {
  std::string command;
  std::string action;  // "" when the command has no actions
  std::string help;
  std::vector<OptionSpec> options;
};

/// Every subcommand and its options; drives the CLI and config resolution.
const std::vector<ActionSpec>& action_specs();
const ActionSpec& find_action(const std::string& command, const std::string& action);

/// Bad parameters, unknown keys and other caller mistakes (exit code 2).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Artifact {
  std::string filename;
  std::string content;
};

struct Request {
  std::string command;
  std::string action;
  /// Raw values: strings (from flags or a config file) or JSON scalars.
  nlohmann::json config = nlohmann::json::object();
  unsigned threads = 1;
};

struct Response {
  /// {"format", "command", "action", "config" (fully resolved), "result"}.
  nlohmann::json record;
  std::vector<Artifact> artifacts;
  /// What the CLI prints; the JSON record when empty.
  std::string text;
  /// 0 ok, 1 a verification failed.
  int exit_code = 0;
};

/// Runs one subcommand. Throws UsageError for invalid input. The "report"
/// command with a replay path re-executes the embedded config of an
/// artifact and compares results.
Response execute(const Request& request);

/// Parses a key=value config file ('#' comments, blank lines ignored).
nlohmann::json read_config_file(const std::string& path);

}  // namespace cdp
