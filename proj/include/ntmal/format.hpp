#pragma once

#include <string>

namespace ntmal {

// Shortest decimal that round-trips to the same double; "inf"/"-inf"/"nan"
// for non-finite values.
std::string format_double(double value);

// Fixed-point with `digits` decimals, for human-facing tables.
std::string format_fixed(double value, int digits);

}  // namespace ntmal
