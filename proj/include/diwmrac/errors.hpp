#pragma once

#include <stdexcept>
#include <string>

namespace diwmrac {

/// Invalid configuration: bad scenario file, gain conditions violated,
/// divisor underflow. Raised before any integration starts.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during a run: non-finite derivative or state divergence.
/// The message carries the offending time and state.
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace diwmrac
