#pragma once

#include <stdexcept>
#include <string>

namespace omega {

// Operational failure: bad path, malformed file, broken subprocess.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Domain-rule failure: prefix violation, inconsistent omega bits,
// out-of-bound parameters. The CLI maps these to exit status 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

// Decider request that got no usable answer.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace omega
