#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "tuplesieve/divisor_ap.hpp"

using namespace tuplesieve;

TEST_SUITE("divisor_ap") {

TEST_CASE("worked cells") {
    const auto t = build_tables(1000);
    const auto r = divisor_error(10, 3, 1, t);
    CHECK(r.ap_sum == 10);
    CHECK(r.coprime_sum == 18);
    CHECK(r.E == Rational(1));
    CHECK(divisor_error(10, 1, 0, t).E == Rational(0));
}

TEST_CASE("brute force cells") {
    const auto t = build_tables(20000);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 40; ++i) {
        const std::uint64_t x = 1 + rng() % 20000, q = 1 + rng() % 60, a = rng() % q;
        const auto r = divisor_error(static_cast<double>(x), q, a, t);
        CHECK(r.ap_sum == oracle::ap_sum(x, q, a));
        CHECK(r.coprime_sum == oracle::coprime_sum(x, q));
        CHECK(r.E == Rational(oracle::ap_sum(x, q, a)) -
                         Rational(oracle::coprime_sum(x, q), static_cast<std::int64_t>(oracle::phi(q))));
        CHECK(r.coprime == (std::gcd(a, q) == 1));
    }
}

TEST_CASE("weil shape at q = 101") {
    const auto t = build_tables(100000);
    const auto r = divisor_error(1e5, 101, 7, t);
    const double C = r.E.abs().to_double() * std::pow(101.0, 0.25) / std::pow(1e5, 0.51);
    MESSAGE("C = " << C);
    CHECK(std::isfinite(C));
    CHECK(r.weil_ratio == doctest::Approx(r.E.abs().to_double() * std::pow(101.0, 0.25) / std::sqrt(1e5)));
}

TEST_CASE("residue partition") {
    const auto t = build_tables(5000);
    for (std::uint64_t q : {1, 2, 7, 30, 97}) {
        std::int64_t s = 0;
        for (const auto v : residue_tau_sums(5000, q, t)) s += v;
        CHECK(s == oracle::tau_summatory(5000));
    }
}

TEST_CASE("twisted error") {
    const auto t = build_tables(1000);
    CHECK(twisted_error(500, 30, 7, t).Eprime == divisor_error(500, 30, 7, t).E);
    const auto p = twisted_error(500, 7, 0, t);
    CHECK(p.delta == 7);
    CHECK(p.qprime == 1);
    CHECK(p.Eprime == Rational(0));
    // N=100, q=6, a=3: delta=3, q'=2. By hand: tau(3) sum_{d|3} mu(d)/tau(d) E(100/(3d), 2, a_d).
    const auto r = twisted_error(100, 6, 3, t);
    CHECK(r.delta == 3);
    CHECK(r.qprime == 2);
    REQUIRE(r.terms.size() == 2);
    const Rational e1 = divisor_error(33, 2, 1, t).E, e3 = divisor_error(11, 2, 1, t).E;
    CHECK(r.Eprime == Rational(2) * (e1 - Rational(1, 2) * e3));
    CHECK_THROWS_AS(twisted_error(100, 12, 3, t), std::invalid_argument);
}

TEST_CASE("scans") {
    const auto t = build_tables(100000);
    const auto a = bv_scan(1e3, 0.3, 1, t, 4);
    const auto b = bv_scan(1e3, 0.3, 1, t, 4);
    CHECK(a.sum_max_E >= 0);
    CHECK(a.sum_max_E == b.sum_max_E);
    CHECK(bv_scan(1e4, 0.01, 1, t).sum_max_E == 0);

    const auto par = bv_scan(1e5, 0.5, 1, t, 4), ser = bv_scan_serial(1e5, 0.5, 1, t);
    CHECK(par.sum_max_E == ser.sum_max_E);
    CHECK(par.rows.size() == ser.rows.size());

    const auto s_par = smooth_scan(1e5, 0.5, 0.2, 0.05, SmoothFlavor::XPower, t, 4);
    const auto s_ser = smooth_scan_serial(1e5, 0.5, 0.2, 0.05, SmoothFlavor::XPower, t);
    CHECK(s_par.max_statistic == s_ser.max_statistic);
    CHECK(s_par.argmax_q == s_ser.argmax_q);
}

TEST_CASE("smooth moduli") {
    const auto t = build_tables(100000);
    const auto all = smooth_moduli(100000, 0.5, 1.0, SmoothFlavor::XPower, t);
    const auto bv = bv_scan(1e5, 0.5, 1, t);
    std::vector<std::uint64_t> sf;
    for (const auto& r : bv.rows)
        if (r.squarefree && r.q >= 2) sf.push_back(r.q);
    CHECK(all == sf);
    CHECK(smooth_scan(1e5, 0.05, 0.01, 0.05, SmoothFlavor::XPower, t).empty());
    for (const auto q : smooth_moduli(100000, 0.5, 0.5, SmoothFlavor::QPower, t))
        CHECK(static_cast<double>(largest_prime_factor(q, t)) <= std::pow(static_cast<double>(q), 0.5) + 1e-9);
}

TEST_CASE("csv layout") {
    const auto t = build_tables(1000);
    const auto rows = divisor_errors_all_residues(100, 4, t);
    CHECK(rows.size() == 4);
    CHECK(rows[1].ap_sum == oracle::ap_sum(100, 4, 1));
}

}
