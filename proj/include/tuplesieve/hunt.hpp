#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tuplesieve/arith.hpp"

namespace tuplesieve {

struct HuntResult {
    std::vector<std::uint64_t> h;
    double x = 0;
    double rho = 0;
    std::uint64_t bound = 0;                 // floor(rho)
    std::vector<std::uint64_t> hits;         // increasing
    std::vector<std::uint64_t> histogram;    // histogram[s] = #n with sum tau = s, over squarefree products
    std::uint64_t squarefree_count = 0;
    std::uint64_t min_tau_sum = 0;           // 0 when no squarefree product was seen
    std::uint64_t argmin = 0;                // first n attaining the minimum
    double reference = 0;                    // x (log log x)^-1 (log x)^-k
};

// n in [1, x] with prod (n + h_i) squarefree and sum tau(n + h_i) <= floor(rho).
// n with some n + h_i = 1 is skipped.
HuntResult hunt(std::span<const std::uint64_t> h, double x, double rho, const ArithTables& tables, int threads = 0);
HuntResult hunt_serial(std::span<const std::uint64_t> h, double x, double rho, const ArithTables& tables);

struct DensityRow {
    double x = 0;
    std::uint64_t count = 0;
    double ratio = 0;  // count (log log x) (log x)^k / x
};

// One row per grid point; needs at least two.
std::vector<DensityRow> density_report(std::span<const HuntResult> runs);

}  // namespace tuplesieve
