#pragma once

#include <stdexcept>
#include <string>

namespace wstress {

/// Raised on invalid parameters, shape mismatches and non-finite inputs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A stress whose solution provably does not exist (e.g. an upward VaR stress).
class NoSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace wstress
