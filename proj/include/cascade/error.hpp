#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

/// Invalid parameters or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a result that meets its contract.
/// The CLI maps this to exit code 1.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cascade
