#include <cctype>
#include <fstream>
#include <sstream>

#include "loschmidt/cli.hpp"

namespace loschmidt::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace

void Config::set(const std::string& key, std::string value, std::string origin) {
  if (!valid_key(key)) throw ConfigError(origin + ": invalid key '" + key + "'");
  entries_[key] = Setting{std::move(value), std::move(origin)};
}

void Config::assign(std::string_view assignment, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(origin + ": expected key=value, got '" + std::string(assignment) + "'");
  const auto key = trim(assignment.substr(0, eq));
  const auto value = trim(assignment.substr(eq + 1));
  if (value.empty()) throw ConfigError(origin + ": empty value for '" + std::string(key) + "'");
  set(std::string(key), std::string(value), origin);
}

void Config::load_text(std::string_view text, const std::string& name) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool previous_output = false;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (lineno == 1 && v.starts_with("# loschmidt")) previous_output = true;
    if (previous_output) {
      if (!v.starts_with("#@")) continue;
      v.remove_prefix(2);
    } else {
      // '#' at the start of a line or after whitespace begins a comment
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == '#' && (i == 0 || v[i - 1] == ' ' || v[i - 1] == '\t')) {
          v = v.substr(0, i);
          break;
        }
      }
    }
    v = trim(v);
    if (v.empty()) continue;
    const std::string origin = name + ":" + std::to_string(lineno);
    const auto eq = v.find('=');
    if (eq != std::string_view::npos) {
      const std::string key(trim(v.substr(0, eq)));
      if (auto it = seen.find(key); it != seen.end())
        throw ConfigError(origin + ": duplicate key '" + key + "' (first set on line " + std::to_string(it->second) +
                          ")");
      seen[key] = lineno;
    }
    assign(v, origin);
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  load_text(ss.str(), path);
}

const Setting* Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

}  // namespace loschmidt::cli
