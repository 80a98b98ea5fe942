// Error types thrown by the numeric layers.
//
// Domain errors signal invalid arguments (caller bug or bad config);
// numeric errors signal a computation that refused to degrade silently
// (quadrature not converging, divergent integral, non-finite field value).

#pragma once

#include <stdexcept>
#include <string>

namespace fkmc {

struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fkmc
