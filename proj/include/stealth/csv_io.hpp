#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stealth::csv {

/// 17 significant digits ("%.17g"); round-trips every double.
std::string format_real(double value);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;  // 1-based source line of each row

    /// Column position of `name`; throws ValidationError if absent.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

/// Comma-separated table with a mandatory header row. Blank lines and lines
/// starting with '#' are ignored; cells are whitespace-trimmed. Throws
/// SyntaxError on ragged rows.
Table parse(std::string_view text);

double parse_real(std::string_view cell, std::size_t line);
long long parse_integer(std::string_view cell, std::size_t line);

std::string read_file(const std::string& path);

}  // namespace stealth::csv
