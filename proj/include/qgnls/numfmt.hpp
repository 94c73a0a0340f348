#pragma once

#include <string>

namespace qgnls {

// Shortest decimal representation that parses back to the same double.
// Non-finite values are written as "nan", "inf", "-inf".
std::string format_double(double value);

}  // namespace qgnls
