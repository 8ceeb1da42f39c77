#pragma once

#include <stdexcept>
#include <string>

namespace modsym {

// Error taxonomy shared across the library. The CLI maps membership/parse
// errors to exit code 1 and precision/resource errors to exit code 2.

struct MembershipError : std::runtime_error {
    explicit MembershipError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct PrecisionError : std::runtime_error {
    explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace modsym
