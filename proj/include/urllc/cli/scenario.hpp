// SPDX-License-Identifier: Apache-2.0
//
// Scenario files: one `key = value` per line, `#` starts a comment. Keys name
// subcommand flags without the leading dashes; underscores and dashes are
// interchangeable. The optional key `module` must match the subcommand.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace urllc::cli {

class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(const std::string& message, std::string key)
      : std::invalid_argument(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ScenarioEntry {
  std::string key;  ///< normalized to dashes
  std::string value;
  std::size_t line = 0;
};

struct Scenario {
  std::optional<std::string> module;
  std::vector<ScenarioEntry> entries;
};

Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

}  // namespace urllc::cli
