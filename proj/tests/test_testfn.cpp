#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tuplesieve/functionals.hpp"
#include "tuplesieve/testfn.hpp"

using namespace tuplesieve;

namespace {

double quintic(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * u * (10 - 15 * u + 6 * u * u);
}

TestFunctionParams params(std::size_t k, double T, double d1, double d2) { return {k, T, d1, d2}; }

}  // namespace

TEST_SUITE("testfn") {

TEST_CASE("g") {
    CHECK(g_eval(0, 10) == 1);
    CHECK(g_eval(10, 10) == 0);
    CHECK(g_eval(12, 10) == 0);
    CHECK(g_eval(2, 10) == doctest::Approx(std::exp(-1.0) * 0.8).epsilon(1e-15));
    CHECK_THROWS_AS(g_eval(-1, 10), std::invalid_argument);
}

TEST_CASE("gram integrals against quadrature") {
    for (const double T : {0.5, 5.0, 10.0, 20.0, 50.0}) {
        const auto gi = gram_integrals(T);
        const double ups = oracle::quad([T](double t) { return std::pow(std::exp(-t / 2) * (1 - t / T), 2); }, 0, T);
        const double tg2 =
            oracle::quad([T](double t) { return t * std::pow(std::exp(-t / 2) * (1 - t / T), 2); }, 0, T);
        const double tgp2 = oracle::quad(
            [T](double t) { return t * std::pow(std::exp(-t / 2) * (-0.5 * (1 - t / T) - 1 / T), 2); }, 0, T);
        CHECK(std::fabs(gi.upsilon - ups) < 1e-10);
        CHECK(std::fabs(gi.t_g2 - tg2) < 1e-10);
        CHECK(std::fabs(gi.t_gprime2 - tgp2) < 1e-10);
        CHECK(gi.upsilon >= 1 - 2 / T);
        CHECK(std::fabs(mu_ratio(T) - tg2 / ups) < 1e-10);
    }
    CHECK(gram_integrals(10).upsilon == doctest::Approx(1 - 2 * (9 + std::exp(-10.0)) / 100).epsilon(1e-14));
}

TEST_CASE("mu ratio limits") {
    CHECK(mu_ratio(1e4) == doctest::Approx(1).epsilon(1e-3));
    CHECK(std::fabs(mu_ratio(10) - mu_ratio_simplified_display(10)) > 1e-3);
    // With T = k/log log k the true mu is 1 - O(1/T), so 1 - mu - T/k is
    // negative; only the simplified display makes it look positive.
    const double k = 1e4, T = k / std::log(std::log(k));
    CHECK(1 - mu_ratio(T) - T / k < 0);
    CHECK(1 - mu_ratio(T) - T / k == doctest::Approx(2 / T - 1 / std::log(std::log(k))).epsilon(1e-3));
    CHECK(1 - mu_ratio_simplified_display(T) - T / k > 0);
}

TEST_CASE("bumps") {
    const TestFunction tf(params(3, 2.4, 0.3, 0.2));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 2000; ++i) {
        const std::vector<double> t{U(rng) * 0.6, U(rng) * 0.6, U(rng) * 0.6};
        const double r = t[0] + t[1] + t[2];
        const double h = tf.h1(t);
        CHECK(std::fabs(h) <= 1);
        if (r <= 0.7) CHECK(h == 1);
        if (r >= 1) CHECK(h == 0);
        if (r > 0.7 && r < 1) CHECK(h == doctest::Approx(quintic((1 - r) / 0.3)).epsilon(1e-14));
        const double u = U(rng) * 3;
        CHECK(std::fabs(tf.h2(u)) <= 1);
        CHECK(tf.h2(u) == doctest::Approx(u <= 2.2 ? 1 : quintic((2.4 - u) / 0.2)).epsilon(1e-14));
    }
    CHECK(smoothstep(0) == 0);
    CHECK(smoothstep(1) == 1);
    CHECK(smoothstep_derivative(0.5) == doctest::Approx(kSmoothstepSlope));
}

TEST_CASE("defaults") {
    const auto p = TestFunctionParams::with_defaults(10);
    CHECK(p.T == doctest::Approx(10 / std::log(std::log(10.0))));
    CHECK(p.delta1 == doctest::Approx(std::sqrt(std::log(10.0)) / 10));
    CHECK_THROWS_AS(TestFunctionParams::with_defaults(2), std::invalid_argument);
    CHECK(TestFunctionParams::with_defaults(2, 1.5).delta1 == doctest::Approx(std::sqrt(std::log(2.0)) / 2));
}

TEST_CASE("support of F") {
    const TestFunction tf(params(2, 1.5, 0.4, 0.25));
    const QuadSpec spec{1e-9, 1e-8, 2000};
    const std::vector<double> out_box{0.8, 0.05}, out_simplex{0.6, 0.5}, inside{0.1, 0.2};
    CHECK(tf.evaluate(out_box, spec).value == 0);
    CHECK(tf.evaluate(out_simplex, spec).value == 0);
    CHECK(tf.evaluate(inside, spec).value != 0);
    const std::vector<double> swapped{0.2, 0.1};
    CHECK(tf.evaluate(inside, spec).value == doctest::Approx(tf.evaluate(swapped, spec).value).epsilon(1e-8));
}

TEST_CASE("k = 1 value at the origin") {
    const double T = 0.5, d2 = 0.1;
    const TestFunction tf(params(1, T, 0.3, d2));
    const std::vector<double> zero{0.0};
    const double f = tf.evaluate(zero, {1e-12, 1e-12, 2000}).value;
    const auto integrand = [=](double u) { return (u <= T - d2 ? 1 : quintic((T - u) / d2)) * std::exp(-u / 2) * (1 - u / T); };
    const double ref = oracle::quad(integrand, 0, T - d2) + oracle::quad(integrand, T - d2, T);
    CHECK(f == doctest::Approx(-ref).epsilon(1e-10));
}

TEST_CASE("plateau derivatives") {
    const TestFunction tf(params(3, 2.4, 0.3, 0.2));
    const std::vector<double> t{0.1, 0.15, 0.2};
    double prod = 1;
    for (const double x : t) prod *= g_eval(3 * x, 2.4);
    CHECK(tf.mixed(t) == doctest::Approx(prod).epsilon(1e-14));
    const auto terms = tf.mixed_plus_terms(t, 1);
    CHECK(terms.i1 == 0);
    CHECK(terms.i2 == 0);
    const double i3 = 3 * g_derivative(0.45, 2.4) * g_eval(0.3, 2.4) * g_eval(0.6, 2.4);
    CHECK(terms.i3 == doctest::Approx(i3).epsilon(1e-13));
}

TEST_CASE("mixed_plus is the t_m derivative of mixed") {
    const TestFunction tf(params(2, 1.5, 0.4, 0.25));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.02, 0.7);
    int checked = 0;
    while (checked < 50) {
        std::vector<double> t{U(rng), U(rng)};
        if (t[0] + t[1] > 0.97) continue;
        const double h = 1e-5;
        for (std::size_t m = 0; m < 2; ++m) {
            auto tp = t, tm = t;
            tp[m] += h;
            tm[m] -= h;
            const double fd = (tf.mixed(tp) - tf.mixed(tm)) / (2 * h);
            CHECK(tf.mixed_plus(t, m) == doctest::Approx(fd).epsilon(1e-5).scale(1));
        }
        ++checked;
    }
}

TEST_CASE("paper function derivative orders") {
    const SmoothTestFunction F(params(2, 1.5, 0.4, 0.25));
    const std::vector<double> t{0.1, 0.2};
    const std::vector<int> bad{2, 0};
    CHECK_THROWS_AS(F.derivative(t, bad), std::invalid_argument);
    CHECK(F.mixed(t) == F.test_function().mixed(t));
    CHECK(F.box() == doctest::Approx(0.75));
}

TEST_CASE("evaluator cache") {
    FEvaluator ev(TestFunction(params(2, 1.5, 0.4, 0.25)), {1e-9, 1e-8, 2000}, 1e-3);
    const std::vector<double> a{0.1004, 0.2}, b{0.2, 0.1001};
    CHECK(ev(a) == ev(b));
    CHECK(ev.cache_size() == 1);
}

}

TEST_SUITE("functionals") {

TEST_CASE("c integral closed forms") {
    const QuadSpec spec{1e-13, 1e-12, 2000};
    const PolySimplexFunction lin(1, 1), half_sq(1, 2, 0.5), sq2(2, 2);
    const std::vector<int> one{1}, ones{1, 1};
    CHECK(c_integral(lin, lin, one, spec) == doctest::Approx(1).epsilon(1e-12));
    CHECK(c_integral(half_sq, half_sq, one, spec) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(c_integral(sq2, sq2, ones, spec) == doctest::Approx(oracle::poly_c_integral(2, ones, ones).to_double()).epsilon(1e-10));
    const PolySimplexFunction p4(3, 4);
    const std::vector<int> a{1, 1, 1}, b{2, 1, 1}, c{1, 2, 1};
    CHECK(c_integral(p4, p4, a, a, c, spec) ==
          doctest::Approx(oracle::poly_c_integral(4, a, c).to_double()).epsilon(1e-9));
    CHECK(c_integral(p4, p4, b, b, a, spec) ==
          doctest::Approx(oracle::poly_c_integral(4, b, a).to_double()).epsilon(1e-9));
}

TEST_CASE("mc is deterministic and thread independent") {
    const SmoothTestFunction F(params(3, 2.4, 0.3, 0.2));
    const auto a = functionals_mc(F, 50000, 9, 2, 4);
    const auto b = functionals_mc(F, 50000, 9, 2, 1);
    const auto c = functionals_mc_serial(F, 50000, 9, 2);
    CHECK(a.I_F.value == c.I_F.value);
    CHECK(a.alpha.value == c.alpha.value);
    CHECK(a.beta2.std_error == c.beta2.std_error);
    CHECK(b.beta1.value == c.beta1.value);
    CHECK(a.alpha.value >= 0);
    CHECK(a.I_F.value >= 0);
    CHECK(a.beta1.value >= 0);
    CHECK(a.alpha.std_error > 0);
    CHECK(functionals_mc(F, 50000, 10, 2).I_F.value != a.I_F.value);
    CHECK_THROWS_AS(functionals_mc(F, 999, 1, 0), std::invalid_argument);
}

TEST_CASE("mc agrees with quadrature for a polynomial") {
    const PolySimplexFunction F(2, 4);
    const auto q = functionals_quadrature(F, 0, {1e-12, 1e-10, 2000});
    const auto m = functionals_mc(F, 400000, 1, 0);
    for (auto [a, b] : {std::pair{q.alpha, m.alpha}, {q.beta1, m.beta1}, {q.beta2, m.beta2}, {q.I_F, m.I_F}})
        CHECK(std::fabs(a.value - b.value) <= 4 * b.std_error);
    const std::vector<int> ones{1, 1};
    CHECK(q.I_F.value == doctest::Approx(oracle::poly_c_integral(4, ones, ones).to_double()).epsilon(1e-9));
}

TEST_CASE("rho bound") {
    FunctionalEstimates e;
    e.alpha = {2.0, 0};
    e.I_F = {2.0, 0};
    const auto r = rho_bound(3, 0.004, 0.001, e);
    CHECK(r.value == doctest::Approx(3 / (0.5 * (2.0 / 3 + 0.004) - 0.001)));
    CHECK(r.std_error == 0);
    const SmoothTestFunction F(TestFunctionParams::with_defaults(3));
    const auto est = functionals_mc(F, 100000, 5, 2);
    const auto b = rho_bound(3, 0.004, 0.001, est);
    CHECK(std::isfinite(b.value));
    CHECK(b.value > 0);
    CHECK(b.std_error > 0);
    CHECK(rho_asymptotic_constant() == Rational(2126, 2853));
}

TEST_CASE("I(F) bound membership at k = 4") {
    const TestFunction tf(TestFunctionParams::with_defaults(4));
    const auto c = check_I_F_bound(tf, 400000, 2);
    MESSAGE("normalized I(F) " << c.normalized_I_F.value << " in [" << c.lower << ", " << c.upper << "]");
    CHECK(c.within);
}

}
