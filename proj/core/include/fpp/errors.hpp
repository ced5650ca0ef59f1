#pragma once

#include <stdexcept>
#include <string>

namespace fpp {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameter or configuration value (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Numerical domain violation: evaluation outside a law's support,
// degenerate variance, a path that never reaches a required height.
class DomainError : public Error {
public:
    using Error::Error;
};

// Target site not reachable by any directed path.
class UnreachableError : public Error {
public:
    using Error::Error;
};

// Size guard tripped in an enumeration-based operation.
class GuardError : public Error {
public:
    using Error::Error;
};

}  // namespace fpp
