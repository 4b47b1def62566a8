#pragma once

#include <stdexcept>
#include <string>

namespace eit {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  Error(std::string tag_, const std::string& what_)
      : std::runtime_error(what_), tag(std::move(tag_)) {}
  std::string tag;  // short machine-parsable identifier, e.g. "tail-population-breach"
};

// Bad user input: config files, CLI arguments. Maps to exit code 2.
struct ConfigError : Error {
  ConfigError(const std::string& tag_, const std::string& what_) : Error(tag_, what_) {}
};

// Failures of the computation itself: breached monitors, non-convergence,
// ambiguous kernels, invalid preconditions on physics inputs. Exit code 3.
struct NumericalError : Error {
  NumericalError(const std::string& tag_, const std::string& what_) : Error(tag_, what_) {}
};

}  // namespace eit
