#pragma once

#include <string>
#include <vector>

namespace aqg {

// Minimal RFC-4180-style CSV. Fields may be quoted; quotes escape as "".
// Multiline fields are not supported; an unterminated quote is an error.
// `source` prefixes error messages when given.
std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& source = "");

std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);

} // namespace aqg
