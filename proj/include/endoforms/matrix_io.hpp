#pragma once

// Matrix file reading. Two layouts are accepted:
//   {"n": 3, "rows": [[...], [...], [...]]}
//   a whitespace grid, one row per line ('#' starts a comment line)

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "endoforms/errors.hpp"
#include "endoforms/linalg.hpp"

namespace endo {

/// Input error with a source location (1-based; 0 when not applicable).
class ParseError : public InputError {
public:
    ParseError(const std::string& source, std::size_t line, std::size_t column,
               const std::string& what)
        : InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column)
    {
    }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

namespace detail {

inline bool parse_number(std::string_view tok, double& out)
{
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    if (tok.empty()) return false;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out, std::chars_format::general);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

inline void line_col(std::string_view text, std::size_t offset, std::size_t& line, std::size_t& col)
{
    line = 1;
    col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

inline Mat parse_grid(std::string_view text, const std::string& source)
{
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> row_lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::size_t i = 0;
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i < line.size() && line[i] != '#') {
            std::vector<double> row;
            while (i < line.size()) {
                while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
                if (i >= line.size()) break;
                std::size_t j = i;
                while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
                double v = 0.0;
                const std::string_view tok = line.substr(i, j - i);
                if (!parse_number(tok, v))
                    throw ParseError(source, line_no, i + 1,
                                     "expected a finite decimal number, found '" + std::string(tok) + "'");
                row.push_back(v);
                i = j;
            }
            if (!rows.empty() && row.size() != rows.front().size())
                throw ParseError(source, line_no, 1,
                                 "row has " + std::to_string(row.size()) + " entries, expected " +
                                     std::to_string(rows.front().size()));
            rows.push_back(std::move(row));
            row_lines.push_back(line_no);
        }
        if (eol == text.size()) break;
        pos = eol + 1;
    }
    if (rows.empty()) throw ParseError(source, line_no, 1, "no matrix rows found");
    const std::size_t n = rows.front().size();
    if (rows.size() != n)
        throw ParseError(source, rows.size() > n ? row_lines[n] : line_no, 1,
                         "found " + std::to_string(rows.size()) + " rows, expected " +
                             std::to_string(n) + " (square matrix)");
    Mat m(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m(r, c) = rows[r][c];
    return m;
}

// Location of the start of the value at the given path inside a JSON text,
// found by re-scanning. Only used to point error messages somewhere useful.
inline std::size_t locate_rows_entry(std::string_view text, std::size_t row, std::size_t col,
                                     bool want_col)
{
    const std::size_t key = text.find("\"rows\"");
    if (key == std::string_view::npos) return 0;
    std::size_t i = text.find('[', key);
    if (i == std::string_view::npos) return key;
    // walk the outer array
    std::size_t depth = 0, r = 0, c = 0;
    bool in_str = false;
    for (std::size_t p = i; p < text.size(); ++p) {
        const char ch = text[p];
        if (in_str) {
            if (ch == '\\') ++p;
            else if (ch == '"') in_str = false;
            continue;
        }
        if (ch == '"') {
            in_str = true;
            if (depth == 2 && r == row && c == col && want_col) return p;
            continue;
        }
        if (ch == '[') {
            ++depth;
            if (depth == 2 && r == row && !want_col) return p;
            if (depth == 2) c = 0;
            continue;
        }
        if (ch == ']') {
            if (depth == 1) return p;
            --depth;
            continue;
        }
        if (ch == ',') {
            if (depth == 1) ++r;
            if (depth == 2) ++c;
            continue;
        }
        if (depth == 2 && r == row && c == col && want_col &&
            !std::isspace(static_cast<unsigned char>(ch)))
            return p;
    }
    return key;
}

inline Mat parse_json_matrix(std::string_view text, const std::string& source)
{
    using Json = nlohmann::json;
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 0, col = 0;
        line_col(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
        std::string msg = e.what();
        if (const auto p = msg.find(": "); p != std::string::npos) msg = msg.substr(p + 2);
        throw ParseError(source, line, col, "malformed JSON: " + msg);
    }
    auto fail_at = [&](std::size_t offset, const std::string& what) {
        std::size_t line = 0, col = 0;
        line_col(text, offset, line, col);
        throw ParseError(source, line, col, what);
    };
    if (!j.is_object()) fail_at(0, "expected an object with keys \"n\" and \"rows\"");
    if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() < 1)
        fail_at(text.find("\"n\"") == std::string_view::npos ? 0 : text.find("\"n\""),
                "\"n\" must be a positive integer");
    const auto n = static_cast<std::size_t>(j["n"].get<long long>());
    if (!j.contains("rows") || !j["rows"].is_array()) fail_at(0, "\"rows\" must be an array");
    const auto& rows = j["rows"];
    if (rows.size() != n)
        fail_at(locate_rows_entry(text, 0, 0, false),
                "\"rows\" has " + std::to_string(rows.size()) + " rows, expected n = " + std::to_string(n));
    Mat m(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (!rows[r].is_array() || rows[r].size() != n)
            fail_at(locate_rows_entry(text, r, 0, false),
                    "row " + std::to_string(r + 1) + " must hold " + std::to_string(n) + " numbers");
        for (std::size_t c = 0; c < n; ++c) {
            const auto& v = rows[r][c];
            if (!v.is_number())
                fail_at(locate_rows_entry(text, r, c, true),
                        "entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                            ") is not a number");
            m(r, c) = v.get<double>();
            if (!std::isfinite(m(r, c)))
                fail_at(locate_rows_entry(text, r, c, true), "entry is not finite");
        }
    }
    return m;
}

} // namespace detail

inline Mat parse_matrix(std::string_view text, const std::string& source = "<input>")
{
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && text[i] == '{') return detail::parse_json_matrix(text, source);
    return detail::parse_grid(text, source);
}

inline std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Mat read_matrix_file(const std::string& path) { return parse_matrix(read_text_file(path), path); }

} // namespace endo
