#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hstokes/report.hpp"

namespace hstokes::config {

// Flat dotted-key configuration ("problem.alpha = 0.5"). Sources stack:
// optional file first, then command-line assignments, later wins. Every
// lookup records the value actually used -- including fallbacks for absent
// keys -- so a run report can embed its fully resolved configuration, and
// keys that no lookup ever consumed are rejected as unknown.
class RunConfig {
 public:
  RunConfig() = default;

  // Parse "key = value" lines; '#' starts a comment, blank lines are
  // skipped. Throws std::invalid_argument with the offending line.
  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text,
                             const std::string& origin = "<config>");

  // One "key=value" assignment, applied on top of whatever is loaded.
  void apply_override(const std::string& assignment);

  // Typed lookups; a malformed value throws std::invalid_argument naming
  // the key. Absent keys yield the fallback.
  double number(const std::string& key, double fallback);
  long long integer(const std::string& key, long long fallback);
  std::string text(const std::string& key, const std::string& fallback);
  bool flag(const std::string& key, bool fallback);
  // Comma-separated list of numbers.
  std::vector<double> numbers(const std::string& key, std::span<const double> fallback);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  // Throws std::invalid_argument naming every key that was set but never
  // consumed (the usual symptom of a typo).
  void reject_unknown() const;

  // Extra resolved entries that do not come from the key store (e.g. the
  // subcommand or output directory), for embedding alongside the rest.
  void note(const std::string& key, report::JsonValue value);

  // All consumed values, sorted by key.
  report::JsonValue resolved() const;

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, report::JsonValue> consumed_;
};

}  // namespace hstokes::config
