#ifndef BRWLAB_ERRORS_HPP
#define BRWLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace brwlab {

// Error taxonomy maps onto the CLI exit codes:
//   ConfigError / AddressError / DomainError -> 2
//   ResourceError                            -> 3
//   InternalConsistencyError                 -> 4

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct AddressError : std::runtime_error {
    explicit AddressError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Support caps, population caps, data not retained, sample failures.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// A check that can only fail if the library itself is wrong.
struct InternalConsistencyError : std::runtime_error {
    explicit InternalConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace brwlab

#endif
