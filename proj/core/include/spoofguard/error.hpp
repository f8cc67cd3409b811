#pragma once

#include <stdexcept>
#include <string>

namespace spoofguard {

// Single exception type for everything the toolkit can reject: bad files,
// bad configuration, shape mismatches. The message carries the context
// (path, byte offset, tensor name) the caller needs.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

}  // namespace spoofguard
