// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria (capped at 255 by the shell).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tuplesieve/admissible.hpp"
#include "tuplesieve/arith.hpp"
#include "tuplesieve/divisor_ap.hpp"
#include "tuplesieve/functionals.hpp"
#include "tuplesieve/hunt.hpp"
#include "tuplesieve/sieve.hpp"
#include "tuplesieve/testfn.hpp"

using namespace tuplesieve;
using V = std::vector<std::uint64_t>;

namespace tol {
constexpr double c1_seconds = 5;
constexpr double c4_abs = 1e-10;
constexpr double c5_quad = 1e-10;
constexpr double c5_gap_factor = 10;
constexpr double c6_float = 1e-6;
constexpr double c7_quad = 1e-6;
constexpr double c7_rel = 1e-3;
constexpr double c7_step = 0.02;
constexpr double c8_sigmas = 3;
constexpr double c8_seconds = 60;
constexpr double c10_lo = 0.5, c10_hi = 2.0;
constexpr double c11_mean_rel = 0.1;
constexpr double c12_seconds = 600;
}  // namespace tol

namespace {

int failures = 0;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

void c1() {
    const auto t0 = Clock::now();
    const auto t = build_tables(10000);
    std::uint64_t bad = 0;
    for (std::uint64_t n = 1; n <= 10000; ++n) {
        bad += t.tau(n) != oracle::tau(n);
        bad += t.mu(n) != oracle::mu(n);
        bad += t.phi(n) != oracle::phi(n);
    }
    const double s = since(t0);
    report(1, bad == 0 && s < tol::c1_seconds, fmt("tau/mu/phi vs trial division n<=1e4: %llu mismatches, %.2f s",
                                                   static_cast<unsigned long long>(bad), s));
}

void c2(const ArithTables& t) {
    std::mt19937_64 rng(2);
    int bad = 0;
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t x = 1 + rng() % 100000, q = 1 + rng() % 200;
        std::int64_t s = 0;
        for (const auto& r : divisor_errors_all_residues(x, q, t)) s += r.ap_sum;
        bad += s != oracle::tau_summatory(x);
    }
    report(2, bad == 0, fmt("sum over residues of ap_sum = hyperbola sum, 50 random (x,q): %d mismatches", bad));
}

void c3(const ArithTables& t) {
    std::mt19937_64 rng(3);
    int cells = 0, bad = 0;
    while (cells < 100) {
        const std::uint64_t q = 1 + rng() % 500, a = rng() % q, x = 1 + rng() % 100000;
        if (!t.mu(q) || std::gcd(a, q) != 1) continue;
        const auto tw = twisted_error(static_cast<double>(x), q, a, t);
        const auto e = divisor_error(static_cast<double>(x), q, a, t);
        bad += !(tw.Eprime == e.E) || tw.delta != 1;
        ++cells;
    }
    report(3, bad == 0, fmt("E' = E on 100 random coprime cells: %d mismatches", bad));
}

void c4() {
    double worst = 0;
    bool bound = true;
    for (const double T : {5.0, 10.0, 20.0, 50.0}) {
        const auto g = gram_integrals(T);
        const auto gt = [T](double t) { return std::exp(-t / 2) * (1 - t / T); };
        const auto gp = [T](double t) { return std::exp(-t / 2) * (-0.5 * (1 - t / T) - 1 / T); };
        const double u = oracle::quad([&](double t) { return gt(t) * gt(t); }, 0, T);
        const double a = oracle::quad([&](double t) { return t * gp(t) * gp(t); }, 0, T);
        const double b = oracle::quad([&](double t) { return t * gt(t) * gt(t); }, 0, T);
        worst = std::max({worst, std::fabs(g.upsilon - u), std::fabs(g.t_gprime2 - a), std::fabs(g.t_g2 - b)});
        bound = bound && g.upsilon >= 1 - 2 / T;
    }
    report(4, worst <= tol::c4_abs && bound,
           fmt("closed forms vs quadrature at T=5,10,20,50: max abs err %.2e; Upsilon >= 1-2/T %s", worst,
               bound ? "holds" : "violated"));
}

void c5() {
    const double T = 10;
    const auto gt = [T](double t) { return std::exp(-t / 2) * (1 - t / T); };
    const double num = oracle::quad([&](double t) { return t * gt(t) * gt(t); }, 0, T, 1e-15);
    const double den = oracle::quad([&](double t) { return gt(t) * gt(t); }, 0, T, 1e-15);
    const double mu = mu_ratio(T), disp = mu_ratio_simplified_display(T);
    const double gap = std::fabs(mu - disp), err = std::fabs(mu - num / den);
    report(5, gap > tol::c5_gap_factor * tol::c5_quad && err <= tol::c5_quad,
           fmt("mu(10)=%.12f, quadrature ratio err %.2e, simplified display %.12f differs by %.3e", mu, err, disp,
               gap));
}

void c6() {
    const Rational c = rho_asymptotic_constant();
    const double v = c.to_double();
    report(6, c == Rational(2126, 2853) && std::fabs(v - 0.745181) <= tol::c6_float && c < Rational(3, 4),
           fmt("constant %s = %.9f, below 3/4", c.str().c_str(), v));
}

// The 2^k-point central mixed difference over [t-s, t+s]^k, extrapolated in s^2.
double mixed_difference(const TestFunction& tf, std::span<const double> t, double s, const QuadSpec& spec) {
    const std::size_t k = t.size();
    auto D = [&](double h) {
        double acc = 0;
        std::vector<double> u(k);
        for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
            int sign = 1;
            for (std::size_t j = 0; j < k; ++j) {
                const bool up = (mask >> j) & 1;
                u[j] = t[j] + (up ? h : -h);
                if (!up) sign = -sign;
            }
            acc += sign * tf.evaluate(u, spec).value;
        }
        return acc / std::pow(2 * h, static_cast<double>(k));
    };
    return (4 * D(s / 2) - D(s)) / 3;
}

void c7() {
    const QuadSpec spec{tol::c7_quad, tol::c7_quad, 2000};
    const double h = tol::c7_step;
    double worst = 0;
    int points = 0;
    for (const TestFunctionParams& p : {TestFunctionParams{2, 1.5, 0.4, 0.25}, TestFunctionParams{3, 2.4, 0.3, 0.2}}) {
        const TestFunction tf(p);
        std::mt19937_64 rng(7 + p.k);
        std::uniform_real_distribution<double> U(0, 1);
        int n = 0;
        while (n < 20) {
            std::vector<double> t(p.k);
            double r = 0;
            for (double& x : t) {
                x = h + U(rng) * (tf.kappa() - 2 * h);
                r += x;
            }
            if (r + static_cast<double>(p.k) * h >= 1) continue;
            const double exact = tf.mixed(t);
            if (std::fabs(exact) < 0.05) continue;
            worst = std::max(worst, std::fabs(mixed_difference(tf, t, h, spec) - exact) / std::fabs(exact));
            ++n;
        }
        points += n;
    }
    report(7, worst <= tol::c7_rel,
           fmt("F^(1) vs differences of F at tol %.0e, %d points (k=2,3): max rel err %.2e", tol::c7_quad, points,
               worst));
}

void c8() {
    const auto t0 = Clock::now();
    const SmoothTestFunction F({2, 1.5, 0.4, 0.25});
    const auto mc = functionals_mc(F, 1000000, 1, 1);
    const auto q = functionals_quadrature(F, 1, {1e-11, 1e-10, 4000});
    const double s = since(t0);
    const double zi = std::fabs(mc.I_F.value - q.I_F.value) / mc.I_F.std_error;
    const double za = std::fabs(mc.alpha.value - q.alpha.value) / mc.alpha.std_error;
    report(8, zi <= tol::c8_sigmas && za <= tol::c8_sigmas && s < tol::c8_seconds,
           fmt("k=2, 1e6 samples: I(F) off by %.2f SE, alpha off by %.2f SE, %.1f s", zi, za, s));
}

WeightSystem poly_ws(const V& h, double N, int a) {
    return WeightSystem(SieveConfig::make(h, N, 3, 0.004, 0.001, 1.0), h,
                        std::make_shared<PolySimplexFunction>(h.size(), a));
}

void c9() {
    const V h{0, 2};
    const auto ws = poly_ws(h, 1e4, 1);
    const auto t = build_tables(ws.table_need());
    const double s1 = s1_direct(ws, t);
    const double s2_0 = s2_direct(ws, t, 0), s2_1 = s2_direct(ws, t, 1);
    const auto naive = oracle::naive_sieve_sums(ws);
    report(9, s1 == naive.s1 && s2_0 == naive.s2[0] && s2_1 == naive.s2[1],
           fmt("N=1e4, F=(1-t1-t2)_+: S1 %.17g vs %.17g, S2 %.17g+%.17g vs %.17g+%.17g", s1, naive.s1, s2_0, s2_1,
               naive.s2[0], naive.s2[1]));
}

void c10() {
    const V h{0, 2};
    const QuadSpec spec{1e-12, 1e-10, 4000};
    const auto tables = build_tables(poly_ws(h, 1e7, 4).table_need());
    std::vector<double> r1, r2;
    for (const double N : {1e5, 1e6, 1e7}) {
        const auto ws = poly_ws(h, N, 4);
        const auto s = sieve_sums(ws, tables);
        double pred2 = 0;
        for (std::size_t m = 0; m < ws.k(); ++m) pred2 += predict_s2(m, ws, functionals_quadrature(ws.F(), m, spec));
        r1.push_back(s.s1 / predict_s1(ws, spec));
        r2.push_back(s.s2 / pred2);
    }
    auto toward_one = [](const std::vector<double>& r) {
        for (std::size_t i = 1; i < r.size(); ++i)
            if (!(std::fabs(r[i] - 1) < std::fabs(r[i - 1] - 1))) return false;
        return true;
    };
    auto in_band = [](double x) { return x >= tol::c10_lo && x <= tol::c10_hi; };
    report(10, toward_one(r1) && toward_one(r2) && in_band(r1.back()) && in_band(r2.back()),
           fmt("k=2, (1-t1-t2)^4: S1 ratios %.3f %.3f %.3f, S2 ratios %.3f %.3f %.3f at N=1e5,1e6,1e7", r1[0], r1[1],
               r1[2], r2[0], r2[1], r2[2]));
}

void c11() {
    const V h{0, 2};
    const auto ws = poly_ws(h, 1e6, 4);
    const auto t = build_tables(ws.table_need());
    const auto s = h2prime_survey(0, 50, ws, t);
    report(11, !s.rows.empty() && s.mean_relative <= tol::c11_mean_rel,
           fmt("N=1e6, prod d<=50, %zu tuples: mean |r|/main %.4f (ratio of means %.4f, max %.4f)", s.rows.size(),
               s.mean_relative, s.ratio_of_means, s.max_relative));
}

void c12(const ArithTables& t) {
    const auto t0 = Clock::now();
    const auto smooth = smooth_scan(1e6, 0.6, 0.15, 0.05, SmoothFlavor::XPower, t);
    const auto all = smooth_scan(1e6, 0.6, 1.0, 0.05, SmoothFlavor::XPower, t);
    const double s = since(t0);
    const bool ok = !smooth.empty() && std::isfinite(smooth.max_statistic) &&
                    smooth.max_statistic < all.max_statistic && s < tol::c12_seconds;
    report(12, ok,
           fmt("x=1e6, q<=x^0.6: smooth max %.4g at q=%llu over %zu moduli, all squarefree max %.4g at q=%llu over "
               "%zu, %.1f s",
               smooth.max_statistic, static_cast<unsigned long long>(smooth.argmax_q.value_or(0)), smooth.rows.size(),
               all.max_statistic, static_cast<unsigned long long>(all.argmax_q.value_or(0)), all.rows.size(), s));
}

void c13(const ArithTables& t) {
    std::uint64_t bad = 0, total = 0;
    const std::vector<std::pair<V, double>> runs{{{0, 2}, 4}, {{0, 2, 6}, 10}, {{0, 4, 6, 10}, 14}};
    std::size_t twins = 0;
    for (const auto& [h, rho] : runs) {
        const auto r = hunt(h, 1e5, rho, t);
        if (h.size() == 2) twins = r.hits.size();
        for (const auto n : r.hits) {
            ++total;
            std::uint64_t s = 0;
            bool ok = true;
            for (std::size_t i = 0; i < h.size(); ++i) {
                s += oracle::tau(n + h[i]);
                ok = ok && oracle::squarefree(n + h[i]);
                for (std::size_t j = 0; j < i; ++j) ok = ok && std::gcd(n + h[i], n + h[j]) == 1;
            }
            bad += !ok || s > static_cast<std::uint64_t>(rho);
        }
    }
    const auto expect = oracle::twin_prime_pairs(100000);
    report(13, bad == 0 && twins == expect,
           fmt("%llu hits rechecked, %llu failures; H={0,2} rho=4 x=1e5: %zu hits vs %llu twin pairs",
               static_cast<unsigned long long>(total), static_cast<unsigned long long>(bad), twins,
               static_cast<unsigned long long>(expect)));
}

}  // namespace

int main() {
    const auto tables = build_tables(1000010);
    guarded(1, c1);
    guarded(2, [&] { c2(tables); });
    guarded(3, [&] { c3(tables); });
    guarded(4, c4);
    guarded(5, c5);
    guarded(6, c6);
    guarded(7, c7);
    guarded(8, c8);
    guarded(9, c9);
    guarded(10, c10);
    guarded(11, c11);
    guarded(12, [&] { c12(tables); });
    guarded(13, [&] { c13(tables); });
    std::printf("%d of 13 criteria failed\n", failures);
    return std::min(failures, 255);
}
