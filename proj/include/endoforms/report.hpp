#pragma once

// JSON report serialization. Doubles are written with 17 significant digits so
// every value re-parses to the same binary64.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "endoforms/linalg.hpp"

namespace endo::report {

using Json = nlohmann::ordered_json;

inline std::string format_double(double x)
{
    if (std::isnan(x)) return "\"nan\"";
    if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
    if (x == 0.0) return std::signbit(x) ? "-0.0" : "0.0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    // keep it visibly a float
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

namespace detail {

inline bool is_flat_array(const Json& j)
{
    for (const auto& e : j)
        if (e.is_structured()) return false;
    return true;
}

inline void emit(const Json& j, std::string& out, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in + Json(it.key()).dump() + ": ";
            emit(it.value(), out, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // rows of numbers stay on one line
        if (is_flat_array(j)) {
            out += "[";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += ", ";
                first = false;
                emit(e, out, indent + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in;
            emit(e, out, indent + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case Json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

} // namespace detail

inline std::string to_string(const Json& j)
{
    std::string out;
    detail::emit(j, out, 0);
    out += "\n";
    return out;
}

inline Json to_json(const Vec& v)
{
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline Json to_json(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline Json to_json(const Mat& m)
{
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(to_json(m.row(i)));
    return rows;
}

inline Json vectors_json(const std::vector<Vec>& vs)
{
    Json a = Json::array();
    for (const auto& v : vs) a.push_back(to_json(v));
    return a;
}

} // namespace endo::report
