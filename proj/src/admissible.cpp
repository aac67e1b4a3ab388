#include "tuplesieve/admissible.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tuplesieve/arith.hpp"
#include "tuplesieve/errors.hpp"
#include "tuplesieve/modular.hpp"

namespace tuplesieve {

namespace {

// Smallest class mod p avoided by every value in `classes`, or nullopt if all
// p classes are hit.
std::optional<std::uint32_t> free_class(std::span<const std::uint64_t> classes, std::uint32_t p) {
    std::vector<bool> hit(p, false);
    for (const std::uint64_t c : classes) hit[c % p] = true;
    for (std::uint32_t c = 0; c < p; ++c) {
        if (!hit[c]) return c;
    }
    return std::nullopt;
}
}  // namespace

AdmissibilityResult is_admissible(std::span<const std::uint64_t> input) {
    std::vector<std::uint64_t> h(input.begin(), input.end());
    std::sort(h.begin(), h.end());
    if (std::adjacent_find(h.begin(), h.end()) != h.end()) {
        throw std::invalid_argument("tuple has duplicate elements");
    }
    AdmissibleTuple t;
    t.checked_up_to = h.size();
    for (const std::uint32_t p : primes_below(h.size() + 1)) {
        const auto c = free_class(h, p);
        if (!c) return {std::nullopt, p};
        t.witnesses.push_back({p, *c});
    }
    t.h = std::move(h);
    return {std::move(t), 0};
}

AdmissibleTuple greedy_admissible(std::size_t k, std::uint64_t search_cap) {
    if (k < 1) throw std::invalid_argument("greedy_admissible: k must be >= 1");
    const std::vector<std::uint32_t> primes = primes_below(k + 1);
    std::vector<std::uint64_t> h;
    for (std::uint64_t c = 0; h.size() < k; ++c) {
        if (c > search_cap) {
            throw std::runtime_error("greedy_admissible: search cap " + std::to_string(search_cap) +
                                     " exhausted after " + std::to_string(h.size()) + " elements");
        }
        h.push_back(c);
        // Only primes p <= k matter, but every one of them is checked at each
        // step so the final k-set stays admissible.
        bool ok = true;
        for (const std::uint32_t p : primes) {
            if (!free_class(h, p)) {
                ok = false;
                break;
            }
        }
        if (!ok) h.pop_back();
    }
    auto res = is_admissible(h);
    return std::move(*res.tuple);
}

WTrick w_trick(std::span<const std::uint64_t> h, double D0) {
    WTrick out{1, 0, {}};
    const auto bound = static_cast<std::uint64_t>(std::max(0.0, std::ceil(D0)));
    std::vector<Congruence> parts;
    for (const std::uint32_t p : primes_below(bound)) {
        if (static_cast<double>(p) >= D0) break;
        std::vector<std::uint64_t> neg;
        neg.reserve(h.size());
        for (const std::uint64_t hi : h) neg.push_back((p - hi % p) % p);
        const auto c = free_class(neg, p);
        if (!c) {
            throw InadmissibleError("no W-trick residue: tuple covers every class mod " + std::to_string(p), p);
        }
        const unsigned __int128 w = static_cast<unsigned __int128>(out.W) * p;
        if (w > UINT64_MAX) throw CapacityError("W = prod_{p<D0} p overflows 64 bits");
        out.W = static_cast<std::uint64_t>(w);
        out.primes.push_back(p);
        parts.push_back({*c, p});
    }
    out.b = crt(parts).residue;
    return out;
}

SieveConfig SieveConfig::make(std::span<const std::uint64_t> h, double N, double D0, double varpi,
                              double delta, double kappa, std::optional<double> r_exponent) {
    if (!(N >= 1)) throw std::invalid_argument("SieveConfig: N must be >= 1");
    if (!(kappa > 0)) throw std::invalid_argument("SieveConfig: kappa must be positive");
    SieveConfig c;
    c.k = h.size();
    c.N = N;
    c.D0 = D0;
    const WTrick wt = w_trick(h, D0);
    c.W = wt.W;
    c.b = wt.b;
    c.varpi = varpi;
    c.delta = delta;
    c.kappa = kappa;
    c.eta0 = kappa * (2.0 / 3.0 + varpi) / 2.0;
    c.r_exponent = r_exponent ? *r_exponent : 0.5 * (2.0 / 3.0 + varpi) - delta;
    if (!(c.r_exponent > 0)) throw std::invalid_argument("SieveConfig: R exponent must be positive");
    c.R = std::pow(N, c.r_exponent);
    return c;
}

std::string format_tuple(std::span<const std::uint64_t> h) {
    std::string s = "{";
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(h[i]);
    }
    return s + "}";
}

}  // namespace tuplesieve
