#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "oracles.hpp"
#include "tuplesieve/divisor_ap.hpp"
#include "tuplesieve/sieve.hpp"

using namespace tuplesieve;
using V = std::vector<std::uint64_t>;

namespace {

WeightSystem make_ws(const V& h, double N, std::shared_ptr<const SieveFunction> F, double D0 = 3,
                     std::optional<double> r_exp = std::nullopt) {
    return WeightSystem(SieveConfig::make(h, N, D0, 0.004, 0.001, 1.0, r_exp), h, std::move(F));
}

}  // namespace

TEST_SUITE("sieve") {

TEST_CASE("lambda support") {
    const auto t = build_tables(10000);
    const V h{0, 2};
    const auto ws = make_ws(h, 1e6, std::make_shared<PolySimplexFunction>(2, 4));
    const V ones{1, 1}, nonsq{4, 1}, shares_w{2, 1}, shared{3, 3}, good{3, 5};
    CHECK(ws.lambda(ones, t) == 1);
    CHECK(ws.lambda(nonsq, t) == 0);
    CHECK(ws.lambda(shares_w, t) == 0);
    CHECK(ws.lambda(shared, t) == 0);
    const double t3 = std::log(3.0) / ws.log_R(), t5 = std::log(5.0) / ws.log_R();
    CHECK(ws.lambda(good, t) == doctest::Approx(std::pow(1 - t3 - t5, 4)).epsilon(1e-14));
}

TEST_CASE("zero F gives zero sums") {
    const auto t = build_tables(20000);
    const V h{0, 2};
    const auto ws = make_ws(h, 5000, std::make_shared<ZeroFunction>(2));
    const auto s = sieve_sums(ws, t);
    CHECK(s.s1 == 0);
    CHECK(s.s2 == 0);
}

TEST_CASE("single term support") {
    const auto t = build_tables(20000);
    const V h{0, 2};
    const auto ws = make_ws(h, 5000, std::make_shared<PolySimplexFunction>(2, 2, 1.5), 3, 0.05);
    REQUIRE(ws.config().R < 2);
    const auto s = sieve_sums(ws, t);
    CHECK(s.s1 == 1.5 * 1.5 * 2500);
    CHECK(s.n_count == 2500);
}

TEST_CASE("k = 1 reduces to a progression divisor sum") {
    const auto t = build_tables(20000);
    const V h{0};
    const auto ws = make_ws(h, 5000, std::make_shared<PolySimplexFunction>(1, 1), 3, 0.05);
    const auto hi = residue_tau_sums(10000, ws.config().W, t), lo = residue_tau_sums(5000, ws.config().W, t);
    const std::uint64_t b = ws.config().b % ws.config().W;
    CHECK(sieve_sums(ws, t).s2 == static_cast<double>(hi[b] - lo[b]));
}

TEST_CASE("naive oracle") {
    const auto t = build_tables(20000);
    for (const V& h : {V{0, 2}, V{0, 2, 6}}) {
        const auto ws = make_ws(h, 3000, std::make_shared<PolySimplexFunction>(h.size(), 3));
        const auto fast = sieve_sums(ws, t, 4);
        const auto slow = oracle::naive_sieve_sums(ws);
        CHECK(fast.s1 == slow.s1);
        for (std::size_t m = 0; m < h.size(); ++m) CHECK(fast.s2_by_m[m] == slow.s2[m]);
    }
}

TEST_CASE("serial and parallel agree bitwise") {
    const auto t = build_tables(300000);
    const V h{0, 2, 6};
    const auto ws = make_ws(h, 1e5, std::make_shared<PolySimplexFunction>(3, 4));
    const auto a = sieve_sums(ws, t, 8), b = sieve_sums_serial(ws, t), c = sieve_sums(ws, t, 3);
    CHECK(a.s1 == b.s1);
    CHECK(a.s2 == b.s2);
    CHECK(a.s2_by_m == c.s2_by_m);
    CHECK(a.tuples_visited == b.tuples_visited);
}

TEST_CASE("tables too small") {
    const auto t = build_tables(1000);
    const V h{0, 2};
    const auto ws = make_ws(h, 1e4, std::make_shared<PolySimplexFunction>(2, 4));
    CHECK_THROWS_AS(sieve_sums(ws, t), CapacityError);
}

TEST_CASE("s of rho") {
    CHECK(s_of_rho(3.0 / 2.0, 2.0, 3.0) == 0);
    CHECK(s_of_rho(3.0 / 2.0 + 1, 2.0, 3.0) == 2.0);
}

TEST_CASE("predictions") {
    const V h{0, 2};
    const auto ws = make_ws(h, 1e6, std::make_shared<PolySimplexFunction>(2, 4));
    const std::vector<int> ones{1, 1};
    const double c = predict_s1(ws, {1e-12, 1e-10, 2000}) / prediction_prefactor(ws);
    CHECK(std::fabs(c - oracle::poly_c_integral(4, ones, ones).to_double()) < 1e-8);
    const auto q0 = functionals_quadrature(ws.F(), 0, {1e-12, 1e-10, 2000});
    const auto q1 = functionals_quadrature(ws.F(), 1, {1e-12, 1e-10, 2000});
    CHECK(predict_s2(0, ws, q0) == doctest::Approx(predict_s2(1, ws, q1)).epsilon(1e-9));
    CHECK(predict_s2(0, ws, FunctionalEstimates{}) == 0);
}

TEST_CASE("H2' decomposition") {
    const auto t = build_tables(2100000);
    const V h{0, 2};
    const auto ws = make_ws(h, 1e6, std::make_shared<PolySimplexFunction>(2, 4));
    const V ones{1, 1}, p{1, 5}, bad{2, 1};
    const auto a = h2prime_decompose(0, ones, ws, t);
    CHECK(a.f == 1);
    CHECK(a.v == 0);
    CHECK(a.r == doctest::Approx(static_cast<double>(a.lhs) - a.X));
    MESSAGE("|r|/X at (1,1): " << std::fabs(a.r) / a.X);
    const auto b = h2prime_decompose(0, p, ws, t);
    CHECK(b.v == doctest::Approx(-2 * std::log(5.0) / 4));
    CHECK(b.f == doctest::Approx(25.0 / 4));
    std::uint64_t lhs = 0;
    for (std::uint64_t n = 1000001; n <= 2000000; ++n)
        if (n % 2 == 1 && (n + 2) % 5 == 0) lhs += oracle::tau(n);
    CHECK(b.lhs == lhs);
    CHECK_THROWS_AS(h2prime_decompose(0, bad, ws, t), std::invalid_argument);
    const auto s1 = h2prime_survey(0, 30, ws, t, 4), s2 = h2prime_survey(0, 30, ws, t, 1);
    CHECK(s1.mean_relative == s2.mean_relative);
    CHECK(s1.rows.size() == s2.rows.size());
}

}
