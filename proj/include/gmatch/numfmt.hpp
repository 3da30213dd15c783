#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

#include "gmatch/errors.hpp"

namespace gmatch {

// Shortest representation that round-trips exactly; keeps CSV output
// byte-stable and re-parseable.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, long long line) {
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("expected a real number, got '" + std::string(s) + "'", line);
    return x;
}

inline long long parse_int(std::string_view s, long long line) {
    long long x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("expected an integer, got '" + std::string(s) + "'", line);
    return x;
}

inline std::uint64_t parse_uint64(std::string_view s, long long line) {
    std::uint64_t x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("expected an unsigned integer, got '" + std::string(s) + "'", line);
    return x;
}

}  // namespace gmatch
