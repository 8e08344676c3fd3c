#pragma once

#include <stdexcept>
#include <string>

namespace trajtopo {

// Error taxonomy maps onto CLI exit codes: config/input errors -> 1,
// resource/runtime errors -> 2.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an ODE integration produces non-finite state; carries the
// simulation time at which the blowup was detected.
struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& msg, double when)
      : std::runtime_error(msg), time(when) {}
  double time;
};

}  // namespace trajtopo
