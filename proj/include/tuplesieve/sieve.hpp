#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tuplesieve/admissible.hpp"
#include "tuplesieve/arith.hpp"
#include "tuplesieve/functionals.hpp"
#include "tuplesieve/quadrature.hpp"
#include "tuplesieve/sieve_function.hpp"

namespace tuplesieve {

// lambda_d = mu(d_1)...mu(d_k) F(log d_1/log R, ..., log d_k/log R) on the
// support: each d_j squarefree and <= R^kappa, prod d_j squarefree, coprime
// to W and < R.
class WeightSystem {
public:
    WeightSystem(SieveConfig config, std::vector<std::uint64_t> h, std::shared_ptr<const SieveFunction> F);

    const SieveConfig& config() const { return config_; }
    const std::vector<std::uint64_t>& h() const { return h_; }
    const SieveFunction& F() const { return *F_; }
    std::size_t k() const { return h_.size(); }
    double log_R() const { return log_R_; }
    std::uint64_t component_cap() const { return cap_; }  // largest admissible d_j

    bool in_support(std::span<const std::uint64_t> d, const ArithTables& tables) const;
    double lambda(std::span<const std::uint64_t> d, const ArithTables& tables) const;
    // F part of lambda for a tuple already known to be in the support.
    double weight(std::span<const std::uint64_t> d, int mu_product) const;

    // First and last n in (N, 2N] with n = b mod W.
    std::uint64_t n_begin() const;
    std::uint64_t n_end() const;
    // Largest table index the sums touch.
    std::uint64_t table_need() const;

private:
    SieveConfig config_;
    std::vector<std::uint64_t> h_;
    std::shared_ptr<const SieveFunction> F_;
    double log_R_;
    std::uint64_t cap_;
};

struct SieveSums {
    double s1 = 0;
    std::vector<double> s2_by_m;
    double s2 = 0;
    std::uint64_t n_count = 0;
    std::uint64_t tuples_visited = 0;
};

// S1 = sum (sum_{d | n+h} lambda_d)^2 and S2^(m) = sum tau(n+h_m) (...)^2 over
// n in (N, 2N], n = b mod W. Sums are accumulated in FixedSum, so the parallel
// and serial versions agree bit for bit.
SieveSums sieve_sums(const WeightSystem& ws, const ArithTables& tables, int threads = 0);
SieveSums sieve_sums_serial(const WeightSystem& ws, const ArithTables& tables);

double s1_direct(const WeightSystem& ws, const ArithTables& tables, int threads = 0);
double s2_direct(const WeightSystem& ws, const ArithTables& tables, std::optional<std::size_t> m = std::nullopt,
                 int threads = 0);

inline double s_of_rho(double rho, double s1, double s2) { return rho * s1 - s2; }

// W^(k-1)/phi(W)^k * N/(log R)^k.
double prediction_prefactor(const WeightSystem& ws);
double predict_s1(const WeightSystem& ws, const QuadSpec& spec);
double predict_s2(std::size_t m, const WeightSystem& ws, const FunctionalEstimates& est);

inline constexpr double kEulerGamma = 0.57721566490153286061;

struct H2PrimeDecomposition {
    std::size_t m = 0;
    std::vector<std::uint64_t> d;
    std::uint64_t lhs = 0;    // sum of tau(n+h_m) over the restricted n
    std::uint64_t terms = 0;  // number of such n
    std::uint64_t q = 0;      // W prod d_j
    std::uint64_t a = 0;      // class of n+h_m mod q
    double X = 0, Xstar = 0;
    double f = 0, fstar = 0, v = 0;
    double main = 0;  // X/f + X* v/f*
    double r = 0;     // lhs - main
};

H2PrimeDecomposition h2prime_decompose(std::size_t m, std::span<const std::uint64_t> d, const WeightSystem& ws,
                                       const ArithTables& tables);

struct H2PrimeSummary {
    std::size_t m = 0;
    std::uint64_t max_product = 0;
    std::vector<H2PrimeDecomposition> rows;
    double mean_relative = 0;       // mean of |r|/main
    double ratio_of_means = 0;      // mean |r| / mean main
    double max_relative = 0;
};

// All in-support tuples with prod d_j <= max_product.
H2PrimeSummary h2prime_survey(std::size_t m, std::uint64_t max_product, const WeightSystem& ws,
                              const ArithTables& tables, int threads = 0);

}  // namespace tuplesieve
