#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace ordifun {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

/// Strict double parse of a whole string view.
inline bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

/// Strict integer parse of a whole string view.
inline bool parse_int(const std::string& text, long long& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

}  // namespace ordifun
