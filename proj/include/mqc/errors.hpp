#pragma once

#include <stdexcept>
#include <string>

namespace mqc {

// Base for all failures raised by this library. Callers that need to
// distinguish bad input from broken internal state can catch the
// subclasses below.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or malformed data handed in by the caller.
class invalid_input : public error {
 public:
  using error::error;
};

// Text that failed to parse; carries a 1-based line number when known.
class parse_error : public invalid_input {
 public:
  parse_error(const std::string& what, int line = 0)
      : invalid_input(line > 0 ? "line " + std::to_string(line) + ": " + what
                               : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// An internal invariant did not hold; indicates a bug, not bad input.
class internal_error : public error {
 public:
  using error::error;
};

}  // namespace mqc
