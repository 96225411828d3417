#include "stealth/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stealth/errors.hpp"

namespace stealth::csv {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ValidationError("CSV is missing column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
    for (const auto& h : header) {
        if (h == name) return true;
    }
    return false;
}

Table parse(std::string_view text) {
    Table table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto cells = split(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw SyntaxError(line_no, "expected " + std::to_string(table.header.size()) + " CSV fields, got " +
                                           std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
        table.row_lines.push_back(line_no);
    }
    if (!have_header) throw SyntaxError(1, "CSV has no header row");
    return table;
}

double parse_real(std::string_view cell, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw SyntaxError(line, "not a number: '" + std::string(cell) + "'");
    }
    return v;
}

long long parse_integer(std::string_view cell, std::size_t line) {
    long long v = 0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw SyntaxError(line, "not an integer: '" + std::string(cell) + "'");
    }
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace stealth::csv
