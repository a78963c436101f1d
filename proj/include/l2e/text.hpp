#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace l2e {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);
bool parse_bool(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::string join_ints(const std::vector<int>& v);
std::vector<int> parse_int_list(std::string_view text);

}  // namespace l2e
