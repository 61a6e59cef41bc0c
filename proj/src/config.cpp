#include "hstokes/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hstokes::config {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

std::pair<std::string, std::string> split_assignment(const std::string& line,
                                                     const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) fail("missing '=' in \"" + line + "\" (" + where + ")");
  const std::string key = trim(line.substr(0, eq));
  if (key.empty()) fail("empty key in \"" + line + "\" (" + where + ")");
  return {key, trim(line.substr(eq + 1))};
}

double parse_number(const std::string& key, const std::string& value) {
  if (value.empty()) fail("key " + key + " has an empty value");
  const char* begin = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + value.size())
    fail("key " + key + " expects a number, got \"" + value + "\"");
  return v;
}

long long parse_integer(const std::string& key, const std::string& value) {
  if (value.empty()) fail("key " + key + " has an empty value");
  const char* begin = value.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(begin, &end, 10);
  if (end != begin + value.size())
    fail("key " + key + " expects an integer, got \"" + value + "\"");
  return v;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) fail("cannot open file " + path);
  std::stringstream buffer;
  buffer << stream.rdbuf();
  return from_text(buffer.str(), path);
}

RunConfig RunConfig::from_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream stream(text);
  std::string raw;
  for (long line_number = 1; std::getline(stream, raw); ++line_number) {
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    auto [key, value] =
        split_assignment(line, origin + ":" + std::to_string(line_number));
    cfg.entries_[key] = value;
  }
  return cfg;
}

void RunConfig::apply_override(const std::string& assignment) {
  auto [key, value] = split_assignment(assignment, "command line");
  entries_[key] = value;
}

double RunConfig::number(const std::string& key, double fallback) {
  const auto it = entries_.find(key);
  const double v = it == entries_.end() ? fallback : parse_number(key, it->second);
  consumed_[key] = report::JsonValue(v);
  return v;
}

long long RunConfig::integer(const std::string& key, long long fallback) {
  const auto it = entries_.find(key);
  const long long v = it == entries_.end() ? fallback : parse_integer(key, it->second);
  consumed_[key] = report::JsonValue(v);
  return v;
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) {
  const auto it = entries_.find(key);
  const std::string v = it == entries_.end() ? fallback : it->second;
  consumed_[key] = report::JsonValue(v);
  return v;
}

bool RunConfig::flag(const std::string& key, bool fallback) {
  const auto it = entries_.find(key);
  bool v = fallback;
  if (it != entries_.end()) {
    if (it->second == "true" || it->second == "1")
      v = true;
    else if (it->second == "false" || it->second == "0")
      v = false;
    else
      fail("key " + key + " expects true/false, got \"" + it->second + "\"");
  }
  consumed_[key] = report::JsonValue(v);
  return v;
}

std::vector<double> RunConfig::numbers(const std::string& key,
                                       std::span<const double> fallback) {
  std::vector<double> values;
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    values.assign(fallback.begin(), fallback.end());
  } else {
    std::istringstream stream(it->second);
    std::string item;
    while (std::getline(stream, item, ','))
      values.push_back(parse_number(key, trim(item)));
    if (values.empty()) fail("key " + key + " has an empty value");
  }
  report::JsonValue list = report::JsonValue::array();
  for (double v : values) list.push_back(v);
  consumed_[key] = std::move(list);
  return values;
}

void RunConfig::reject_unknown() const {
  std::string unknown;
  for (const auto& [key, value] : entries_) {
    if (consumed_.count(key)) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += key;
  }
  if (!unknown.empty()) fail("unknown key(s): " + unknown);
}

void RunConfig::note(const std::string& key, report::JsonValue value) {
  consumed_[key] = std::move(value);
}

report::JsonValue RunConfig::resolved() const {
  report::JsonValue out = report::JsonValue::object();
  for (const auto& [key, value] : consumed_) out[key] = value;
  return out;
}

}  // namespace hstokes::config
