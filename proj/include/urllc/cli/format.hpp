// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace urllc::cli {

/// General notation with 12 significant digits; "inf", "-inf" and "nan" for
/// non-finite values.
std::string format_number(double x);

/// Splits a comma-separated list, trimming blanks. Empty items are rejected.
std::vector<std::string> split_list(std::string_view text, std::string_view what);
std::vector<double> parse_double_list(std::string_view text, std::string_view what);
std::vector<std::uint64_t> parse_uint_list(std::string_view text, std::string_view what);

/// CSV text built in memory so nothing reaches disk before success.
class CsvBuilder {
 public:
  void comment(std::string_view line);
  void header(std::initializer_list<std::string_view> columns);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

}  // namespace urllc::cli
