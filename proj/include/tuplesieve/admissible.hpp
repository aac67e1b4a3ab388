#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tuplesieve {

// Witness that no prime p <= checked_up_to has all classes mod p occupied.
// For primes above k admissibility is automatic, so checked_up_to == k suffices.
struct AdmissibleTuple {
    std::vector<std::uint64_t> h;  // strictly increasing
    std::uint64_t checked_up_to = 0;
    struct Witness {
        std::uint32_t prime;
        std::uint32_t free_class;  // smallest class mod prime not hit by any h_i
    };
    std::vector<Witness> witnesses;

    std::size_t k() const { return h.size(); }
};

struct AdmissibilityResult {
    std::optional<AdmissibleTuple> tuple;
    std::uint32_t failing_prime = 0;  // first prime whose classes are all covered

    bool admissible() const { return tuple.has_value(); }
};

// Sorts the input, rejects duplicates (std::invalid_argument) and checks every
// prime p <= k.
AdmissibilityResult is_admissible(std::span<const std::uint64_t> h);

// Scans c = 0, 1, 2, ... and keeps c whenever the enlarged set is still
// admissible at every prime p <= k. Throws std::runtime_error if search_cap is
// passed before k elements are found.
AdmissibleTuple greedy_admissible(std::size_t k, std::uint64_t search_cap);

struct WTrick {
    std::uint64_t W;  // product of primes < D0
    std::uint64_t b;  // gcd(b + h_i, W) = 1 for all i
    std::vector<std::uint32_t> primes;
};

// For each prime p < D0 the smallest class c with c + h_i != 0 (mod p) for all
// i is chosen, and the classes are glued by CRT. Throws InadmissibleError when
// some p < D0 admits no such class, CapacityError when W overflows 64 bits.
WTrick w_trick(std::span<const std::uint64_t> h, double D0);

// Parameters tying the W-trick to the sieve support. R = N^(0.5*(2/3+varpi) - delta)
// unless r_exponent overrides the exponent; kappa caps each d_j <= R^kappa.
struct SieveConfig {
    std::size_t k = 0;
    double N = 0;
    double D0 = 0;
    std::uint64_t W = 1;
    std::uint64_t b = 0;
    double varpi = 0;
    double eta0 = 0;
    double kappa = 1;
    double delta = 0;
    double r_exponent = 0;  // log R / log N
    double R = 1;

    static SieveConfig make(std::span<const std::uint64_t> h, double N, double D0, double varpi,
                            double delta, double kappa, std::optional<double> r_exponent = {});
};

std::string format_tuple(std::span<const std::uint64_t> h);

}  // namespace tuplesieve
