#include "embedclust/format.hpp"

#include <charconv>

namespace embedclust {

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace embedclust
