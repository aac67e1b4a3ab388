#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "tuplesieve/quadrature.hpp"
#include "tuplesieve/rational.hpp"
#include "tuplesieve/sieve_function.hpp"
#include "tuplesieve/testfn.hpp"

namespace tuplesieve {

struct Estimate {
    double value = 0;
    double std_error = 0;
};

// alpha, beta1, beta2 along direction m, and I(F) = int (F^(1))^2, over the
// support of F. beta2 is a signed integral; the others are nonnegative.
struct FunctionalEstimates {
    std::size_t k = 0;
    std::size_t direction = 0;
    Estimate alpha, beta1, beta2, I_F;
    // Covariance of the four estimators in the order alpha, beta1, beta2, I_F.
    std::array<std::array<double, 4>, 4> covariance{};
    double upsilon = 0;
    double mu = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string method;
};

inline constexpr std::uint64_t kMcBlock = 1u << 14;

// Uniform sampling of [0, min(box, 1)]^k with rejection to the simplex. The
// sample stream is split into fixed blocks of kMcBlock with per-block seeds,
// so the result depends on (samples, seed) only. upsilon and mu are filled
// when F is a SmoothTestFunction.
FunctionalEstimates functionals_mc(const SieveFunction& F, std::uint64_t samples, std::uint64_t seed,
                                   std::size_t direction, int threads = 0);
FunctionalEstimates functionals_mc_serial(const SieveFunction& F, std::uint64_t samples, std::uint64_t seed,
                                          std::size_t direction);

// The same four integrals by nested adaptive quadrature; std_error carries
// the quadrature error estimate.
FunctionalEstimates functionals_quadrature(const SieveFunction& F, std::size_t direction, const QuadSpec& spec);

// (-1)^(|a|+|b|) int prod t_j^(c_j-1)/(c_j-1)! G^(a) H^(b) over the common support.
double c_integral(const SieveFunction& G, const SieveFunction& H, std::span<const int> a, std::span<const int> b,
                  std::span<const int> c, const QuadSpec& spec);
// C^(a) = C^(a,a,a).
double c_integral(const SieveFunction& G, const SieveFunction& H, std::span<const int> a, const QuadSpec& spec);
// C*_j = C^(a,a,a+e_j) - C^(a-e_j,a,a) - C^(a,a-e_j,a).
double c_star(const SieveFunction& G, const SieveFunction& H, std::span<const int> a, std::size_t j,
              const QuadSpec& spec);

struct RhoBound {
    double value = 0;
    double std_error = 0;
    double c = 0;  // (2/3 + varpi)/2 - delta
};

RhoBound rho_bound(std::size_t k, double varpi, double delta, const FunctionalEstimates& est);
Rational rho_asymptotic_constant();

// The bracket in the I(F) lower bound, with its pieces. All scaled by
// k^k / Upsilon^(k-1).
struct IFBoundCheck {
    Estimate normalized_I_F;
    Estimate shell_mass;   // int over the h1 shell of prod g(k t_j)^2
    double lower = 0;      // (1 - T/(k(1-T/k-mu)^2)) Upsilon - shell_mass
    double upper = 0;      // Upsilon
    bool within = false;   // lower - 3 se <= value <= upper + 3 se
};

IFBoundCheck check_I_F_bound(const TestFunction& tf, std::uint64_t samples, std::uint64_t seed, int threads = 0);

}  // namespace tuplesieve
