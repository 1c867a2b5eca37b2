// SPDX-License-Identifier: Apache-2.0

#include "urllc/cli/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

namespace urllc::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  Scenario scenario;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError("scenario line " + std::to_string(line_no) + ": expected key = value, got '" + line + "'",
                          line);
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw ScenarioError("scenario line " + std::to_string(line_no) + ": missing key", key);
    if (value.empty()) throw ScenarioError("scenario key '" + key + "' has no value", key);
    if (key == "module") {
      scenario.module = value;
      continue;
    }
    const bool duplicate = std::any_of(scenario.entries.begin(), scenario.entries.end(),
                                       [&](const ScenarioEntry& e) { return e.key == key; });
    if (duplicate) throw ScenarioError("scenario key '" + key + "' appears twice", key);
    scenario.entries.push_back({key, value, line_no});
  }
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

}  // namespace urllc::cli
