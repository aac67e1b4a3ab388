#include "tuplesieve/hunt.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tuplesieve/errors.hpp"

namespace tuplesieve {

namespace {

constexpr std::uint64_t kBlock = 1u << 16;

struct Partial {
    std::vector<std::uint64_t> hits;
    std::vector<std::uint64_t> histogram;
    std::uint64_t squarefree = 0;
    std::uint64_t min_sum = 0;
    std::uint64_t argmin = 0;
};

Partial scan_block(std::span<const std::uint64_t> h, std::uint64_t lo, std::uint64_t hi, std::uint64_t bound,
                   const ArithTables& tables) {
    Partial p;
    std::vector<std::uint64_t> values(h.size());
    for (std::uint64_t n = lo; n <= hi; ++n) {
        bool skip = false;
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            values[i] = n + h[i];
            if (values[i] == 1) skip = true;
        }
        if (skip || !is_squarefree_product(values, tables)) continue;
        for (const std::uint64_t v : values) sum += tables.tau(v);
        ++p.squarefree;
        if (p.histogram.size() <= sum) p.histogram.resize(sum + 1, 0);
        ++p.histogram[sum];
        if (p.min_sum == 0 || sum < p.min_sum) {
            p.min_sum = sum;
            p.argmin = n;
        }
        if (sum <= bound) p.hits.push_back(n);
    }
    return p;
}

HuntResult prepare(std::span<const std::uint64_t> h, double x, double rho, const ArithTables& tables) {
    if (h.empty()) throw std::invalid_argument("hunt: empty tuple");
    if (!(x >= 1)) throw std::invalid_argument("hunt: x must be >= 1");
    if (!(rho >= 0)) throw std::invalid_argument("hunt: rho must be nonnegative");
    HuntResult r;
    r.h.assign(h.begin(), h.end());
    r.x = x;
    r.rho = rho;
    r.bound = static_cast<std::uint64_t>(std::floor(rho));
    const std::uint64_t top = static_cast<std::uint64_t>(std::floor(x)) + *std::max_element(h.begin(), h.end());
    if (top > tables.limit()) {
        throw CapacityError("hunt needs tables up to " + std::to_string(top) + ", have " +
                            std::to_string(tables.limit()));
    }
    const double lx = std::log(x);
    const double llx = std::log(lx);
    r.reference = (x > std::exp(1.0) && llx > 0) ? x / llx / std::pow(lx, static_cast<double>(h.size())) : 0.0;
    return r;
}

void merge(HuntResult& r, const std::vector<Partial>& parts) {
    for (const Partial& p : parts) {
        r.hits.insert(r.hits.end(), p.hits.begin(), p.hits.end());
        if (r.histogram.size() < p.histogram.size()) r.histogram.resize(p.histogram.size(), 0);
        for (std::size_t s = 0; s < p.histogram.size(); ++s) r.histogram[s] += p.histogram[s];
        r.squarefree_count += p.squarefree;
        if (p.min_sum != 0 && (r.min_tau_sum == 0 || p.min_sum < r.min_tau_sum)) {
            r.min_tau_sum = p.min_sum;
            r.argmin = p.argmin;
        }
    }
}

}  // namespace

HuntResult hunt(std::span<const std::uint64_t> h, double x, double rho, const ArithTables& tables, int threads) {
    HuntResult r = prepare(h, x, rho, tables);
    const std::uint64_t xmax = static_cast<std::uint64_t>(std::floor(x));
    const std::uint64_t blocks = (xmax + kBlock - 1) / kBlock;
    std::vector<Partial> parts(blocks);
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
        const std::uint64_t lo = 1 + static_cast<std::uint64_t>(b) * kBlock;
        parts[b] = scan_block(h, lo, std::min(xmax, lo + kBlock - 1), r.bound, tables);
    }
    merge(r, parts);
    return r;
}

HuntResult hunt_serial(std::span<const std::uint64_t> h, double x, double rho, const ArithTables& tables) {
    HuntResult r = prepare(h, x, rho, tables);
    const std::uint64_t xmax = static_cast<std::uint64_t>(std::floor(x));
    merge(r, {scan_block(h, 1, xmax, r.bound, tables)});
    return r;
}

std::vector<DensityRow> density_report(std::span<const HuntResult> runs) {
    if (runs.size() < 2) throw std::invalid_argument("density_report: at least two grid points required");
    std::vector<DensityRow> rows;
    for (const HuntResult& r : runs) {
        DensityRow row;
        row.x = r.x;
        row.count = r.hits.size();
        row.ratio = r.reference > 0 ? static_cast<double>(row.count) / r.reference : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tuplesieve
