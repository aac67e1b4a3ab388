#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace tuplesieve {

// Order-independent accumulator. Every addend is rounded once to a multiple of
// 2^-kFracBits and summed in a 128-bit integer, so the result does not depend
// on summation order or on how the work was split across threads.
class FixedSum {
public:
    static constexpr int kFracBits = 50;

    void add(double v) {
        if (!std::isfinite(v) || std::fabs(v) >= 0x1p62) {
            throw std::overflow_error("FixedSum: addend out of range");
        }
        const double whole = std::trunc(v);
        const double frac = v - whole;  // exact
        acc_ += static_cast<__int128>(static_cast<std::int64_t>(whole)) << kFracBits;
        acc_ += static_cast<__int128>(std::llround(std::ldexp(frac, kFracBits)));
    }

    FixedSum& operator+=(const FixedSum& other) {
        acc_ += other.acc_;
        return *this;
    }

    double value() const {
        // Depends only on acc_, so equal sums give equal doubles.
        const __int128 hi = acc_ >> 64;
        const auto lo = static_cast<std::uint64_t>(acc_);
        return std::ldexp(static_cast<double>(hi), 64 - kFracBits) +
               std::ldexp(static_cast<double>(lo), -kFracBits);
    }

    __int128 raw() const { return acc_; }
    bool operator==(const FixedSum&) const = default;

private:
    __int128 acc_ = 0;
};

}  // namespace tuplesieve
