#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <type_traits>
#include <span>
#include <string>
#include <vector>

#include "tuplesieve/errors.hpp"

namespace tuplesieve {

struct QuadSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_intervals = 2000;  // subinterval budget per 1-D integral
};

struct QuadResult {
    double value = 0;
    double error = 0;
    std::size_t intervals = 0;
};

namespace detail {

using Callback = double (*)(double, void*);
QuadResult integrate_raw(Callback fn, void* ctx, double a, double b, const QuadSpec& spec,
                         std::span<const double> breakpoints);

}  // namespace detail

// Adaptive Gauss-Kronrod (GSL QAG, 15-point rule) of f over [a, b]. Interior
// breakpoints split the range; each piece gets an equal share of abs_tol.
// Throws QuadratureError when the target max(abs_tol, rel_tol |I|) is not met
// within spec.max_intervals subintervals.
template <typename F>
QuadResult integrate(F&& f, double a, double b, const QuadSpec& spec, std::span<const double> breakpoints = {}) {
    using Fn = std::remove_reference_t<F>;
    // Exceptions must not unwind through the C library; park and rethrow.
    struct Ctx {
        Fn* f;
        std::exception_ptr err;
    } ctx{&f, nullptr};
    auto trampoline = [](double x, void* p) -> double {
        auto* c = static_cast<Ctx*>(p);
        if (c->err) return 0.0;
        try {
            return (*c->f)(x);
        } catch (...) {
            c->err = std::current_exception();
            return 0.0;
        }
    };
    QuadResult r;
    try {
        r = detail::integrate_raw(trampoline, &ctx, a, b, spec, breakpoints);
    } catch (...) {
        if (ctx.err) std::rethrow_exception(ctx.err);
        throw;
    }
    if (ctx.err) std::rethrow_exception(ctx.err);
    return r;
}

// The truncated simplex {t : lower_j <= t_j <= box, sum t_j <= total}.
struct SimplexBox {
    std::vector<double> lower;
    double box = 1;
    double total = 1;
};

// Nested adaptive integration of f(t) over a SimplexBox, one coordinate per
// level (t_0 outermost). breaks(level, t, partial_sum) may add interior
// breakpoints for that level's 1-D integral. Every level runs with `spec`;
// the reported error is the outermost level's estimate.
using LevelBreaks = std::function<void(std::size_t level, std::span<const double> t, double partial,
                                       std::vector<double>& out)>;

QuadResult integrate_simplex_box(const std::function<double(std::span<const double>)>& f,
                                 const SimplexBox& region, const QuadSpec& spec, const LevelBreaks& breaks = {});

}  // namespace tuplesieve
