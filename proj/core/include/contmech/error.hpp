#pragma once

#include <stdexcept>
#include <string>

namespace contmech {

// Thrown on violated preconditions. The CLI maps it to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw UsageError(msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw UsageError(msg);
}

}  // namespace contmech
