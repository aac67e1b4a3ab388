#pragma once

#include <stdexcept>
#include <string>

namespace tuplesieve {

// A request that would exceed the configured memory cap or a table limit.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A tuple fails admissibility at some prime (or no W-trick residue exists).
struct InadmissibleError : std::runtime_error {
    InadmissibleError(const std::string& what, unsigned long long prime)
        : std::runtime_error(what), prime(prime) {}
    unsigned long long prime;
};

// Adaptive quadrature could not reach its error target within the node budget.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tuplesieve
