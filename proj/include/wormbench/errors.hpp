#pragma once

#include <stdexcept>
#include <string>

namespace wormbench {

// Invalid user-supplied configuration (scenario files, parameters, presets).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while running a simulation or writing its outputs.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data handed to an analysis routine.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wormbench
