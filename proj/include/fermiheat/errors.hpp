#pragma once

#include <stdexcept>
#include <string>

namespace fermiheat {

// Thrown when a request exceeds a hard resource guard (e.g. Fock-space
// dimension or combinatorial expansion caps).
class resource_limit_error : public std::runtime_error {
public:
    explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when two routes that must agree (e.g. relative-entropy heat vs
// energy increment) disagree beyond their stated tolerance.
class numeric_inconsistency_error : public std::runtime_error {
public:
    explicit numeric_inconsistency_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fermiheat
