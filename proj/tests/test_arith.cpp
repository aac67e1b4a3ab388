#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "tuplesieve/arith.hpp"
#include "tuplesieve/errors.hpp"

using namespace tuplesieve;

TEST_SUITE("arith") {

TEST_CASE("small values") {
    const auto t = build_tables(12);
    CHECK(t.tau(12) == 6);
    CHECK(t.mu(12) == 0);
    CHECK(t.phi(12) == 4);
    CHECK(t.spf(12) == 2);
    const auto one = build_tables(1);
    CHECK(one.tau(1) == 1);
    CHECK(one.mu(1) == 1);
    CHECK(one.phi(1) == 1);
}

TEST_CASE("tables match trial division") {
    const auto t = build_tables(5000, {.segment_size = 97});
    for (std::uint64_t n = 1; n <= 5000; ++n) {
        REQUIRE(t.tau(n) == oracle::tau(n));
        REQUIRE(t.mu(n) == oracle::mu(n));
        REQUIRE(t.phi(n) == oracle::phi(n));
        REQUIRE(t.is_prime(n) == oracle::is_prime(n));
    }
}

TEST_CASE("segmented build equals linear sieve") {
    for (const std::uint64_t limit : {1ull, 2ull, 100ull, 65537ull, 300000ull}) {
        const auto a = build_tables_serial(limit);
        const auto b = build_tables(limit, {.segment_size = 4096, .threads = 4});
        CHECK(a == b);
    }
}

TEST_CASE("squarefree density") {
    const auto t = build_tables(1000000);
    std::uint64_t c = 0;
    for (std::uint64_t n = 1; n <= t.limit(); ++n) c += t.mu(n) != 0;
    CHECK(std::fabs(static_cast<double>(c) / 1e6 - 6 / (std::numbers::pi * std::numbers::pi)) < 1e-3);
}

TEST_CASE("tau_k") {
    const auto t = build_tables(100);
    CHECK(tau_k(1, 5, t) == 1);
    CHECK(tau_k(12, 2, t) == 6);
    std::uint64_t brute = 0;
    for (int a = 1; a <= 12; ++a)
        for (int b = 1; b <= 12; ++b)
            for (int c = 1; c <= 12; ++c) brute += a * b * c == 12;
    CHECK(tau_k(12, 3, t) == brute);
    CHECK(brute == 18);
}

TEST_CASE("squarefree products and smoothness") {
    const auto t = build_tables(100);
    const std::vector<std::uint64_t> a{5, 7, 11}, b{4, 3}, c{6, 15};
    CHECK(is_squarefree_product(a, t));
    CHECK_FALSE(is_squarefree_product(b, t));
    CHECK_FALSE(is_squarefree_product(c, t));
    CHECK(is_smooth(30, 5, t));
    CHECK_FALSE(is_smooth(30, 4, t));
    CHECK(is_smooth(1, 1, t));
    CHECK(largest_prime_factor(1, t) == 1);
    CHECK(largest_prime_factor(98, t) == 7);
}

TEST_CASE("squarefree divisors") {
    const auto t = build_tables(1000);
    std::vector<std::uint64_t> d;
    squarefree_divisors(360, 1000, t, d);
    CHECK(d == std::vector<std::uint64_t>{1, 2, 3, 5, 6, 10, 15, 30});
    squarefree_divisors(360, 7, t, d);
    CHECK(d == std::vector<std::uint64_t>{1, 2, 3, 5, 6});
}

TEST_CASE("cache round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "tuplesieve_test_cache";
    std::filesystem::remove_all(dir);
    const auto a = load_or_build_tables(5000, dir);
    CHECK(std::filesystem::exists(table_cache_file(dir, 5000)));
    const auto b = load_or_build_tables(5000, dir);
    CHECK(a == b);
    std::filesystem::remove_all(dir);
}

TEST_CASE("memory cap") {
    CHECK_THROWS_AS(build_tables(1000000, {.memory_cap_bytes = 1000}), CapacityError);
    CHECK_THROWS_AS(build_tables_serial(1000000, 1000), CapacityError);
}

TEST_CASE("range checks") {
    const auto t = build_tables(10);
    CHECK_THROWS_AS(t.require(0), std::out_of_range);
    CHECK_THROWS_AS(t.require(11), std::out_of_range);
}

}
