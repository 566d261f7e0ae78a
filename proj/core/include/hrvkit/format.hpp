#pragma once

#include <charconv>
#include <cstdlib>
#include <string>

namespace hrvkit {

/// Format a double with 6 significant digits, locale-independent.
/// All file formats and JSON reports use this so outputs are byte-stable.
inline std::string format_g6(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value,
                             std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

/// Round a double to its 6-significant-digit printed value.
inline double round_g6(double value) {
    const std::string s = format_g6(value);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

}  // namespace hrvkit
