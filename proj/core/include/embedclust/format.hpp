#pragma once

#include <string>

namespace embedclust {

// Shortest decimal form that parses back to the same double. All text
// artifacts use this so reruns with the same seed are byte-identical.
std::string format_double(double value);

}  // namespace embedclust
