#pragma once

#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hrush {

// Bad input: unknown vertex ids, violated preconditions, malformed structures.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A brute-force search would exceed the configured size limit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest number of free vertices an exponential search may range over.
// Read from HK_MAX_VERTICES, default 12.
inline std::size_t default_search_limit() {
  if (const char* env = std::getenv("HK_MAX_VERTICES")) {
    try {
      std::size_t used = 0;
      const unsigned long value = std::stoul(env, &used);
      if (used > 0 && value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
    }
  }
  return 12;
}

inline void require_within_limit(std::size_t size, std::size_t limit,
                                 const std::string& what) {
  if (size > limit) {
    throw ResourceError(what + ": " + std::to_string(size) +
                        " vertices exceed the search limit of " +
                        std::to_string(limit) +
                        " (raise HK_MAX_VERTICES to allow larger searches)");
  }
}

}  // namespace hrush
