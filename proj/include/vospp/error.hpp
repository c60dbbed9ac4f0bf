#pragma once

#include <stdexcept>
#include <string>

namespace vospp {

/// Raised when a caller breaks an operation's precondition (mismatched
/// dimensions, invalid configuration, out-of-range parameters).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Centroid of an empty mask.
class UndefinedCentroid : public std::domain_error {
public:
    UndefinedCentroid() : std::domain_error("center of mass of an empty mask is undefined") {}
};

inline void require(bool condition, const std::string& what) {
    if (!condition) {
        throw ContractError(what);
    }
}

}  // namespace vospp
