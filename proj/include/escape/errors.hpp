#pragma once

#include <stdexcept>
#include <string>

namespace escape {

// Bad input: malformed config, violated precondition, unknown name.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A resource cap (cells, nonzeros, horizon) would be exceeded.
struct CapExceeded : std::length_error {
  using std::length_error::length_error;
};

// No point of the initial cloud survives step 0.
struct ImmediateExtinction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too few surviving steps to fit a decay slope.
struct HorizonTooDeep : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace escape
