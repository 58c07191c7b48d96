#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace ftn {

// Quoting per RFC 4180: only fields containing a comma, quote, or line break
// are quoted, with embedded quotes doubled. Everything else passes through,
// which keeps the numeric columns byte-stable.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Shortest-round-trip would tie the output to the formatter; fixed %.17g is
// verbose but reproduces bit-exactly everywhere. NaN renders as an empty field.
inline std::string csv_num(double x) {
    if (std::isnan(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void csv_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << csv_field(cells[i]);
    }
    os << '\n';
}

}
