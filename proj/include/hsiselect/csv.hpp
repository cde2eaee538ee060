#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace hsi {

// Shortest round-trip decimal form; parsing it back yields the exact double,
// which the evaluation cache relies on for key equality.
inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

inline double parse_double(std::string_view s, const std::string& what = "number") {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw io_error("malformed " + what + ": '" + std::string(s) + "'");
    return v;
}

inline long long parse_int(std::string_view s, const std::string& what = "integer") {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw io_error("malformed " + what + ": '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            out.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T, typename Fmt>
std::string join(const std::vector<T>& v, char delim, Fmt fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += delim;
        out += fmt(v[i]);
    }
    return out;
}

} // namespace hsi
