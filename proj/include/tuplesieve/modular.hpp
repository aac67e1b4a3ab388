#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>

namespace tuplesieve {

struct Congruence {
    std::uint64_t residue;
    std::uint64_t modulus;
};

// Inverse of a modulo m via the extended Euclidean algorithm; nullopt when
// gcd(a, m) != 1. The inverse modulo 1 is 0.
inline std::optional<std::uint64_t> mod_inverse(std::uint64_t a, std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("mod_inverse: zero modulus");
    if (m == 1) return 0;
    __int128 old_r = static_cast<__int128>(a % m), r = m;
    __int128 old_s = 1, s = 0;
    while (r != 0) {
        const __int128 q = old_r / r;
        __int128 t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1) return std::nullopt;
    __int128 inv = old_s % static_cast<__int128>(m);
    if (inv < 0) inv += m;
    return static_cast<std::uint64_t>(inv);
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

// Chinese remainder theorem over pairwise coprime moduli. Returns the unique
// residue in [0, prod) together with prod; throws if the moduli share a factor
// or the product overflows 64 bits.
inline Congruence crt(std::span<const Congruence> parts) {
    Congruence acc{0, 1};
    for (const Congruence& c : parts) {
        if (c.modulus == 0) throw std::invalid_argument("crt: zero modulus");
        const auto inv = mod_inverse(acc.modulus % c.modulus, c.modulus);
        if (!inv) throw std::invalid_argument("crt: moduli not coprime");
        const unsigned __int128 prod = static_cast<unsigned __int128>(acc.modulus) * c.modulus;
        if (prod > UINT64_MAX) throw std::overflow_error("crt: modulus overflow");
        // x = acc.r + acc.m * t with t = (c.r - acc.r) * inv(acc.m) mod c.m
        const std::uint64_t diff = (c.residue % c.modulus + c.modulus - acc.residue % c.modulus) % c.modulus;
        const std::uint64_t t = mul_mod(diff, *inv, c.modulus);
        acc.residue = static_cast<std::uint64_t>(acc.residue + static_cast<unsigned __int128>(acc.modulus) * t);
        acc.modulus = static_cast<std::uint64_t>(prod);
    }
    return acc;
}

}  // namespace tuplesieve
