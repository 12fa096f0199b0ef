#pragma once

#include <string>

namespace gainswitch {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Human-facing rendering with `digits` significant figures.
std::string format_sig(double value, int digits = 3);

} // namespace gainswitch
