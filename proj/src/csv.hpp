#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lucid {
namespace csv {

// Minimal RFC4180 reader/writer. Fields containing commas, quotes or newlines
// are quoted; embedded quotes are doubled. Rows are terminated with '\n'.

std::string escape_field(std::string_view field);

std::string render_row(const std::vector<std::string>& fields);

// Parses a whole document into rows of fields. Handles quoted fields with
// embedded separators and newlines. Throws ParseError on unterminated quotes.
std::vector<std::vector<std::string>> parse(std::string_view text);

} // namespace csv
} // namespace lucid
