#include "tuplesieve/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>

namespace tuplesieve {

namespace {

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;

// One workspace per nesting depth and thread; nested integrals reenter.
struct WorkspacePool {
    std::vector<Workspace> slots;
    std::vector<std::size_t> sizes;
    std::size_t depth = 0;
};
thread_local WorkspacePool pool;

struct DepthGuard {
    gsl_integration_workspace* ws;
    explicit DepthGuard(std::size_t limit) {
        if (pool.slots.size() <= pool.depth) {
            pool.slots.emplace_back();
            pool.sizes.push_back(0);
        }
        if (pool.sizes[pool.depth] < limit) {
            pool.slots[pool.depth].reset(gsl_integration_workspace_alloc(limit));
            pool.sizes[pool.depth] = limit;
        }
        ws = pool.slots[pool.depth].get();
        ++pool.depth;
    }
    ~DepthGuard() { --pool.depth; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;
};

const bool gsl_handler_off = [] {
    gsl_set_error_handler_off();
    return true;
}();

struct NestedIntegrator {
    const std::function<double(std::span<const double>)>& f;
    const SimplexBox& region;
    const QuadSpec& spec;
    const LevelBreaks& breaks;
    std::vector<double> t;
    std::vector<double> lower_tail;  // lower_tail[j] = sum_{i >= j} lower[i]

    QuadResult level(std::size_t j, double partial) {
        const std::size_t k = region.lower.size();
        const double lo = region.lower[j];
        const double hi = std::min(region.box, region.total - partial - lower_tail[j + 1]);
        if (!(hi > lo)) return {};
        std::vector<double> cuts;
        if (breaks) breaks(j, std::span<const double>(t.data(), j), partial, cuts);
        if (j + 1 == k) {
            auto inner = [&](double u) {
                t[j] = u;
                return f(t);
            };
            return integrate(inner, lo, hi, spec, cuts);
        }
        auto inner = [&](double u) {
            t[j] = u;
            return level(j + 1, partial + u).value;
        };
        return integrate(inner, lo, hi, spec, cuts);
    }
};

}  // namespace

namespace detail {

QuadResult integrate_raw(Callback fn, void* ctx, double a, double b, const QuadSpec& spec,
                         std::span<const double> breakpoints) {
    (void)gsl_handler_off;
    if (!(b > a)) return {};
    std::vector<double> cuts{a};
    for (const double c : breakpoints) {
        if (c > a && c < b) cuts.push_back(c);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const std::size_t pieces = cuts.size() - 1;
    const std::size_t limit = std::max<std::size_t>(spec.max_intervals, 1);
    DepthGuard guard(limit);
    gsl_function gf{fn, ctx};
    QuadResult out;
    for (std::size_t i = 0; i < pieces; ++i) {
        double value = 0, err = 0;
        const int status = gsl_integration_qag(&gf, cuts[i], cuts[i + 1], spec.abs_tol / static_cast<double>(pieces),
                                               spec.rel_tol, limit, GSL_INTEG_GAUSS15, guard.ws, &value, &err);
        // Roundoff-limited panels have reached the accuracy double allows.
        if (status != GSL_SUCCESS && status != GSL_EROUND) {
            throw QuadratureError(std::string("adaptive quadrature failed on [") + std::to_string(cuts[i]) + ", " +
                                  std::to_string(cuts[i + 1]) + "]: " + gsl_strerror(status));
        }
        out.value += value;
        out.error += err;
        out.intervals += guard.ws->size;
    }
    return out;
}

}  // namespace detail

QuadResult integrate_simplex_box(const std::function<double(std::span<const double>)>& f,
                                 const SimplexBox& region, const QuadSpec& spec, const LevelBreaks& breaks) {
    const std::size_t k = region.lower.size();
    if (k == 0) {
        return {f(std::span<const double>()), 0, 0};
    }
    NestedIntegrator ni{f, region, spec, breaks, std::vector<double>(k, 0.0), std::vector<double>(k + 1, 0.0)};
    for (std::size_t j = k; j-- > 0;) ni.lower_tail[j] = ni.lower_tail[j + 1] + region.lower[j];
    return ni.level(0, 0.0);
}

}  // namespace tuplesieve
