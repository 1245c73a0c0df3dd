#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "aentd3/errors.hpp"

namespace aentd3 {

// Text round-trip helpers for all persisted numbers. std::to_chars with no
// precision argument emits the shortest decimal string that parses back to
// the identical double, which is what makes checkpoints and metrics files
// bit-faithful and byte-stable across runs.

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_u64(std::uint64_t v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ShapeError("malformed real number: '" + std::string(text) + "'");
    return v;
}

inline std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ShapeError("malformed integer: '" + std::string(text) + "'");
    return v;
}

inline std::int64_t parse_i64(std::string_view text) {
    std::int64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ShapeError("malformed integer: '" + std::string(text) + "'");
    return v;
}

} // namespace aentd3
