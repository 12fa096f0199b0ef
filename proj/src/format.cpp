#include "gainswitch/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace gainswitch {

std::string format_double(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string format_sig(double value, int digits)
{
    if (std::isnan(value)) {
        return "nan";
    }
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*g", digits, value);
    return buf.data();
}

} // namespace gainswitch
