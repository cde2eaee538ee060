#include <catch2/catch_amalgamated.hpp>

#include <hsiselect/csv.hpp>
#include <hsiselect/errors.hpp>
#include <hsiselect/random.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

TEST_CASE("bounded_rand stays in range and is deterministic") {
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t bound = 1 + (i % 97);
        std::uint64_t x = hsi::bounded_rand(a, bound);
        REQUIRE(x < bound);
        REQUIRE(x == hsi::bounded_rand(b, bound));
    }
}

TEST_CASE("bounded_rand with bound one always yields zero") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) REQUIRE(hsi::bounded_rand(rng, 1) == 0);
}

TEST_CASE("bounded_rand covers small ranges") {
    std::mt19937_64 rng(3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 200; ++i) seen.insert(hsi::bounded_rand(rng, 4));
    REQUIRE(seen == std::set<std::uint64_t>{0, 1, 2, 3});
}

TEST_CASE("shuffle_vec yields a permutation and is seed-stable") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    std::vector<int> w = v;

    std::mt19937_64 r1(11), r2(11), r3(12);
    hsi::shuffle_vec(v, r1);
    hsi::shuffle_vec(w, r2);
    REQUIRE(v == w);

    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(50);
    std::iota(expect.begin(), expect.end(), 0);
    REQUIRE(sorted == expect);

    std::vector<int> u = expect;
    hsi::shuffle_vec(u, r3);
    REQUIRE(u != v);  // different seed, astronomically unlikely to collide
}

TEST_CASE("unit_real lies in the half-open unit interval") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5000; ++i) {
        double x = hsi::unit_real(rng);
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
    }
}

TEST_CASE("format_double round-trips exactly through parse_double") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 2000; ++i) {
        double x = hsi::unit_real(rng) * 1000.0 - 500.0;
        REQUIRE(hsi::parse_double(hsi::format_double(x)) == x);
    }
    for (double x : {0.0, 1.0, 0.5, 100.0, 0.08170416594551039, 2.0 / 3.0}) {
        REQUIRE(hsi::parse_double(hsi::format_double(x)) == x);
    }
}

TEST_CASE("parse helpers reject malformed input") {
    REQUIRE_THROWS_AS(hsi::parse_double("abc"), hsi::io_error);
    REQUIRE_THROWS_AS(hsi::parse_double("1.5x"), hsi::io_error);
    REQUIRE_THROWS_AS(hsi::parse_double(""), hsi::io_error);
    REQUIRE_THROWS_AS(hsi::parse_int("2.5"), hsi::io_error);
    REQUIRE_THROWS_AS(hsi::parse_int("seven"), hsi::io_error);
    REQUIRE(hsi::parse_int("-3") == -3);
    REQUIRE_THROWS_AS(hsi::parse_double(" 2.5"), hsi::io_error);  // callers trim first
    REQUIRE(hsi::parse_double(hsi::trim(" 2.5 ")) == 2.5);
}

TEST_CASE("split and trim behave like ordinary csv helpers") {
    auto parts = hsi::split("a,b,,c", ',');
    REQUIRE(parts == std::vector<std::string>{"a", "b", "", "c"});
    REQUIRE(hsi::split("", ',') == std::vector<std::string>{""});
    REQUIRE(hsi::split("x", ',') == std::vector<std::string>{"x"});
    REQUIRE(hsi::trim("  hi\t ") == "hi");
    REQUIRE(hsi::trim("") == "");

    std::vector<int> v{3, 1, 4};
    REQUIRE(hsi::join(v, ';', [](int x) { return std::to_string(x); }) == "3;1;4");
}
