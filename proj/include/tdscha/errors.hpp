#pragma once

#include <stdexcept>
#include <string>

namespace tdscha {

// Bad user input: dimensions, malformed files, out-of-range parameters.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerical failure: loss of positive definiteness, non-convergence,
// unstable curvature where a stable one is required.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tdscha
