#include "stealth/case_ingest.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "stealth/errors.hpp"

namespace stealth {
namespace {

enum class TokenKind { Number, Identifier, String, Symbol, Newline, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    double value = 0.0;
    std::size_t line = 1;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

// Line-oriented lexer for the MATLAB subset used by MATPOWER case files.
// '%' starts a comment, '...' continues a line, and a sign directly followed
// by a digit is part of the number.
class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_blanks();
        Token tok;
        tok.line = line_;
        if (pos_ >= text_.size()) {
            tok.kind = TokenKind::End;
            return tok;
        }
        const char c = text_[pos_];
        if (c == '\n') {
            ++pos_;
            ++line_;
            tok.kind = TokenKind::Newline;
            return tok;
        }
        if (c == '\'') {
            const auto close = text_.find_first_of("'\n", pos_ + 1);
            if (close == std::string_view::npos || text_[close] != '\'') {
                throw SyntaxError(line_, "unterminated string literal");
            }
            tok.kind = TokenKind::String;
            tok.text = std::string(text_.substr(pos_ + 1, close - pos_ - 1));
            pos_ = close + 1;
            return tok;
        }
        if (starts_number(pos_)) {
            return lex_number();
        }
        if (is_ident_start(c)) {
            const auto start = pos_;
            while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
            tok.kind = TokenKind::Identifier;
            tok.text = std::string(text_.substr(start, pos_ - start));
            return tok;
        }
        tok.kind = TokenKind::Symbol;
        tok.text = std::string(1, c);
        ++pos_;
        return tok;
    }

private:
    void skip_blanks() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                ++pos_;
            } else if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (text_.substr(pos_, 3) == "...") {
                // continuation: drop the rest of the line and the newline
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
                if (pos_ < text_.size()) {
                    ++pos_;
                    ++line_;
                }
            } else {
                break;
            }
        }
    }

    bool starts_number(std::size_t p) const {
        auto at = [&](std::size_t i) { return i < text_.size() ? text_[i] : '\0'; };
        std::size_t i = p;
        if (at(i) == '-' || at(i) == '+') ++i;
        if (is_digit(at(i))) return true;
        return at(i) == '.' && is_digit(at(i + 1));
    }

    Token lex_number() {
        Token tok;
        tok.kind = TokenKind::Number;
        tok.line = line_;
        const auto start = pos_;
        auto at = [&](std::size_t i) { return i < text_.size() ? text_[i] : '\0'; };
        if (at(pos_) == '-' || at(pos_) == '+') ++pos_;
        while (is_digit(at(pos_))) ++pos_;
        if (at(pos_) == '.') {
            ++pos_;
            while (is_digit(at(pos_))) ++pos_;
        }
        if (at(pos_) == 'e' || at(pos_) == 'E') {
            std::size_t q = pos_ + 1;
            if (at(q) == '-' || at(q) == '+') ++q;
            if (is_digit(at(q))) {
                pos_ = q;
                while (is_digit(at(pos_))) ++pos_;
            }
        }
        if (is_ident_start(at(pos_))) {
            throw SyntaxError(line_, "malformed number near '" +
                                         std::string(text_.substr(start, pos_ - start + 1)) + "'");
        }
        tok.text = std::string(text_.substr(start, pos_ - start));
        std::string_view digits = tok.text;
        if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), tok.value);
        if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
            throw SyntaxError(line_, "malformed number '" + tok.text + "'");
        }
        return tok;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

struct MatrixBlock {
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> row_lines;
    std::size_t line = 0;
};

std::optional<double> special_value(const std::string& ident) {
    if (ident == "Inf" || ident == "inf") return std::numeric_limits<double>::infinity();
    if (ident == "NaN" || ident == "nan") return std::numeric_limits<double>::quiet_NaN();
    return std::nullopt;
}

class CaseParser {
public:
    explicit CaseParser(std::string_view text) : lexer_(text) { advance(); }

    GridCase parse() {
        while (tok_.kind != TokenKind::End) {
            if (tok_.kind == TokenKind::Newline || is_symbol(";") || is_symbol(",")) {
                advance();
                continue;
            }
            if (tok_.kind == TokenKind::Identifier && tok_.text.rfind("mpc.", 0) == 0) {
                statement();
            } else {
                skip_statement();
            }
        }
        return assemble();
    }

private:
    void advance() { tok_ = lexer_.next(); }
    bool is_symbol(const char* s) const { return tok_.kind == TokenKind::Symbol && tok_.text == s; }

    void statement() {
        const std::string field = tok_.text.substr(4);
        const std::size_t line = tok_.line;
        advance();
        if (!is_symbol("=")) {
            skip_statement();
            return;
        }
        advance();
        if (is_symbol("[")) {
            MatrixBlock block = matrix(line);
            if (field == "bus") {
                bus_ = std::move(block);
            } else if (field == "branch") {
                branch_ = std::move(block);
            }
        } else if (field == "baseMVA") {
            if (tok_.kind != TokenKind::Number) {
                throw SyntaxError(line, "mpc.baseMVA must be assigned a number");
            }
            base_mva_ = tok_.value;
            advance();
            if (!(is_symbol(";") || tok_.kind == TokenKind::Newline || tok_.kind == TokenKind::End)) {
                throw SyntaxError(line, "unexpected token after mpc.baseMVA value");
            }
        } else {
            skip_statement();
        }
    }

    // Skips to the end of the statement, honouring bracket nesting.
    void skip_statement() {
        int depth = 0;
        const std::size_t line = tok_.line;
        while (tok_.kind != TokenKind::End) {
            if (tok_.kind == TokenKind::Symbol) {
                if (tok_.text == "[" || tok_.text == "{" || tok_.text == "(") ++depth;
                if (tok_.text == "]" || tok_.text == "}" || tok_.text == ")") --depth;
                if (depth == 0 && tok_.text == ";") {
                    advance();
                    return;
                }
            }
            if (depth <= 0 && tok_.kind == TokenKind::Newline) {
                advance();
                return;
            }
            advance();
        }
        if (depth > 0) throw SyntaxError(line, "unterminated bracket");
    }

    MatrixBlock matrix(std::size_t line) {
        MatrixBlock block;
        block.line = line;
        std::vector<double> row;
        std::size_t row_line = tok_.line;
        auto flush = [&] {
            if (!row.empty()) {
                block.rows.push_back(std::move(row));
                block.row_lines.push_back(row_line);
                row.clear();
            }
        };
        advance();  // '['
        while (true) {
            if (tok_.kind == TokenKind::End) {
                throw SyntaxError(line, "unterminated matrix");
            }
            if (row.empty()) row_line = tok_.line;
            if (tok_.kind == TokenKind::Number) {
                row.push_back(tok_.value);
            } else if (tok_.kind == TokenKind::Identifier && special_value(tok_.text)) {
                row.push_back(*special_value(tok_.text));
            } else if (tok_.kind == TokenKind::Newline || is_symbol(";")) {
                flush();
            } else if (is_symbol(",")) {
                // optional element separator
            } else if (is_symbol("]")) {
                flush();
                advance();
                break;
            } else {
                throw SyntaxError(tok_.line, "unexpected token '" + tok_.text + "' in matrix");
            }
            advance();
        }
        // The most common width wins so the report points at the odd row out.
        std::map<std::size_t, std::size_t> widths;
        for (const auto& r : block.rows) ++widths[r.size()];
        std::size_t expected = 0, best = 0;
        for (const auto& [w, n] : widths) {
            if (n > best) expected = w, best = n;
        }
        for (std::size_t r = 0; r < block.rows.size(); ++r) {
            if (block.rows[r].size() != expected) {
                throw SyntaxError(block.row_lines[r], "row has " + std::to_string(block.rows[r].size()) +
                                                          " columns, expected " + std::to_string(expected));
            }
        }
        return block;
    }

    GridCase assemble() const {
        if (!base_mva_) throw ValidationError("missing mpc.baseMVA assignment");
        if (!bus_) throw ValidationError("missing mpc.bus block");
        if (!branch_) throw ValidationError("missing mpc.branch block");

        GridCase out;
        out.base_mva = *base_mva_;

        std::optional<BusId> slack;
        for (std::size_t r = 0; r < bus_->rows.size(); ++r) {
            const auto& row = bus_->rows[r];
            if (row.size() < 2) {
                throw SyntaxError(bus_->row_lines[r], "bus rows need at least 2 columns");
            }
            const BusId id = to_bus_id(row[0], bus_->row_lines[r]);
            out.buses.push_back(id);
            if (!slack && row[1] == 3.0) slack = id;
        }
        for (std::size_t r = 0; r < branch_->rows.size(); ++r) {
            const auto& row = branch_->rows[r];
            if (row.size() < 11) {
                throw SyntaxError(branch_->row_lines[r], "branch rows need at least 11 columns");
            }
            BranchRecord br;
            br.from_bus = to_bus_id(row[0], branch_->row_lines[r]);
            br.to_bus = to_bus_id(row[1], branch_->row_lines[r]);
            br.reactance_x = row[3];
            br.in_service = row[10] != 0.0;
            out.branches.push_back(br);
        }
        if (!out.buses.empty()) out.reference_bus = slack.value_or(out.buses.front());
        validate_case(out);
        return out;
    }

    static BusId to_bus_id(double v, std::size_t line) {
        if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > std::numeric_limits<BusId>::max()) {
            throw ValidationError("line " + std::to_string(line) + ": bus id must be an integer");
        }
        return static_cast<BusId>(v);
    }

    Lexer lexer_;
    Token tok_;
    std::optional<double> base_mva_;
    std::optional<MatrixBlock> bus_;
    std::optional<MatrixBlock> branch_;
};

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void validate_case(const GridCase& grid_case) {
    if (!(grid_case.base_mva > 0.0) || !std::isfinite(grid_case.base_mva)) {
        throw ValidationError("baseMVA must be positive");
    }
    if (grid_case.buses.size() < 2) {
        throw ValidationError("a case needs at least 2 buses");
    }
    std::set<BusId> ids;
    for (BusId id : grid_case.buses) {
        if (!ids.insert(id).second) {
            throw ValidationError("duplicate bus id " + std::to_string(id));
        }
    }
    if (!ids.contains(grid_case.reference_bus)) {
        throw ValidationError("reference bus " + std::to_string(grid_case.reference_bus) + " is not declared");
    }
    std::size_t active = 0;
    for (std::size_t k = 0; k < grid_case.branches.size(); ++k) {
        const auto& br = grid_case.branches[k];
        const std::string where = "branch " + std::to_string(k + 1);
        if (!ids.contains(br.from_bus) || !ids.contains(br.to_bus)) {
            throw ValidationError(where + " references an undeclared bus");
        }
        if (br.from_bus == br.to_bus) {
            throw ValidationError(where + " is a self loop");
        }
        if (br.in_service) {
            if (br.reactance_x == 0.0 || !std::isfinite(br.reactance_x)) {
                throw ValidationError(where + " is in service with zero or non-finite reactance");
            }
            ++active;
        }
    }
    if (active == 0) {
        throw EmptyGridError("case has no in-service branch");
    }
}

GridCase parse_case(std::string_view text) { return CaseParser(text).parse(); }

GridCase load_case_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open case file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_case(buffer.str());
}

std::vector<BranchRecord> in_service_branches(const GridCase& grid_case) {
    std::vector<BranchRecord> out;
    for (const auto& br : grid_case.branches) {
        if (br.in_service) out.push_back(br);
    }
    if (out.empty()) throw EmptyGridError("case has no in-service branch");
    return out;
}

std::string render_case(const GridCase& grid_case) {
    std::ostringstream os;
    os << "function mpc = rendered_case\n";
    os << "mpc.baseMVA = " << format_real(grid_case.base_mva) << ";\n\n";
    os << "%\tbus_i\ttype\n";
    os << "mpc.bus = [\n";
    for (BusId id : grid_case.buses) {
        os << '\t' << id << '\t' << (id == grid_case.reference_bus ? 3 : 1) << ";\n";
    }
    os << "];\n\n";
    os << "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\n";
    os << "mpc.branch = [\n";
    for (const auto& br : grid_case.branches) {
        os << '\t' << br.from_bus << '\t' << br.to_bus << "\t0\t" << format_real(br.reactance_x)
           << "\t0\t0\t0\t0\t0\t0\t" << (br.in_service ? 1 : 0) << ";\n";
    }
    os << "];\n";
    return os.str();
}

}  // namespace stealth
