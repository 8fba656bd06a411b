#pragma once

#include <stdexcept>

namespace aertk {

// Malformed or unreadable input data (truncated streams, bad image headers,
// unparseable manifests, I/O failures). Maps to CLI exit code 1.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Violated preconditions or invalid configuration (bad flags, out-of-range
// arguments, shape mismatches). Maps to CLI exit code 2.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace aertk
