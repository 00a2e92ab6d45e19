#pragma once

// Command-line front end. Everything the executable does is reachable from
// run_cli so tests can drive it in-process.

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace loschmidt::cli {

// Bad or unknown configuration; the executable exits with status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Setting {
  std::string value;
  std::string origin;  // "file.cfg:12", "--set", ...
};

// Flat key=value store. Later assignments override earlier ones, so load
// files first and apply --set overrides afterwards.
class Config {
 public:
  // Plain "key = value" lines with '#' comments. A file whose first line
  // starts with "# loschmidt" is a previous output: only its "#@ key=value"
  // header lines are read, so outputs can be fed back in as configs.
  void load_file(const std::string& path);
  void load_text(std::string_view text, const std::string& name);

  // "key=value"
  void assign(std::string_view assignment, const std::string& origin);
  void set(const std::string& key, std::string value, std::string origin);

  const Setting* find(const std::string& key) const;
  const std::map<std::string, Setting>& entries() const { return entries_; }

 private:
  std::map<std::string, Setting> entries_;
};

struct Table {
  std::vector<std::string> notes;  // extra "# ..." metadata lines, without the '#'
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Output {
  std::string command;
  std::vector<std::pair<std::string, std::string>> settings;  // resolved, in schema order
  Table table;
};

std::vector<std::string> command_names();

// Validates the config against the command's keys (unknown or missing keys
// throw ConfigError) and runs it. Output does not depend on threads.
Output run_command(const std::string& command, const Config& config, unsigned threads);

void write_csv(std::ostream& os, const Output& output, unsigned threads);

// Shortest round-trip decimal form.
std::string format_number(double v);

// Exit status: 0 success, 1 configuration error, 2 runtime or numerical error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loschmidt::cli
