#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "geostop/oracles.hpp"
#include "geostop/rng.hpp"
#include "geostop/schedule.hpp"

using namespace geostop;

namespace {
ReturnSchedule quad3() {
    // q_i(n) = i * n^2
    return ReturnSchedule::polynomial({{{2, 1}}, {{2, 2}}, {{2, 3}}});
}
}  // namespace

TEST_CASE("gap: canonical linear pair") {
    const auto s = ReturnSchedule::linear_multiples({1, 2});
    CHECK(s.gap(5) == 5);
    CHECK(s.gap(0) == 0);
    for (std::int64_t n = 0; n <= 100; ++n) CHECK(s.gap(n) == n);
}

TEST_CASE("gap: single return family is an empty minimum") {
    const auto s = ReturnSchedule::linear_multiples({3});
    CHECK_FALSE(s.gap(0).has_value());
    CHECK_FALSE(s.gap(12345).has_value());
    CHECK(s.gamma(10) == 0);
}

TEST_CASE("gap: quadratic family against the direct scan") {
    const auto s = quad3();
    CHECK(s.gap(3) == 9);
    for (std::int64_t n = 0; n <= 100; ++n) CHECK(s.gap(n) == oracle::gap_scan(s, n, 500));
}

TEST_CASE("gap: linear family equals n * min coefficient difference") {
    const auto s = ReturnSchedule::linear_multiples({2, 5, 6, 11});
    for (std::int64_t n = 0; n <= 100; ++n) {
        CHECK(s.gap(n) == n);  // min diff is 6 - 5 = 1
        CHECK(s.gap(n) == oracle::gap_scan(s, n, 500));
    }
}

TEST_CASE("gap is nondecreasing for the built-in kinds") {
    const auto lin = ReturnSchedule::linear_multiples({1, 2});
    const auto qd = quad3();
    std::vector<std::vector<std::int64_t>> rows(2);
    for (std::int64_t n = 0; n <= 1001; ++n) {
        rows[0].push_back(n);
        rows[1].push_back(3 * n + n / 7);
    }
    const auto tab = ReturnSchedule::explicit_table(rows);
    for (std::int64_t n = 1; n <= 1000; ++n) {
        CHECK(*lin.gap(n) >= *lin.gap(n - 1));
        CHECK(*qd.gap(n) >= *qd.gap(n - 1));
        CHECK(*tab.gap(n) >= *tab.gap(n - 1));
    }
}

TEST_CASE("gamma: canonical pair and quadratic examples") {
    const auto lin = ReturnSchedule::linear_multiples({1, 2});
    CHECK(lin.gamma(7) == 14);
    for (std::int64_t n = 1; n <= 40; ++n) CHECK(lin.gamma(n) == 2 * n);
    const auto qd = quad3();
    CHECK(qd.gamma(8) == 4);
    for (std::int64_t n = 1; n <= 40; ++n) {
        CHECK(lin.gamma(n) == oracle::gamma_scan(lin, n, 2000));
        CHECK(qd.gamma(n) == oracle::gamma_scan(qd, n, 2000));
    }
}

TEST_CASE("gamma is nondecreasing") {
    const auto s = quad3();
    std::int64_t prev = 0;
    for (std::int64_t n = 1; n <= 200; ++n) {
        const auto g = s.gamma(n);
        CHECK(g >= prev);
        prev = g;
    }
}

TEST_CASE("gamma: unreachable threshold fails with a diagnostic") {
    std::vector<std::vector<std::int64_t>> rows(2);
    for (std::int64_t n = 0; n <= 32; ++n) {
        rows[0].push_back(n);
        rows[1].push_back(n + 2 + n / 4);
    }
    const auto tab = ReturnSchedule::explicit_table(rows);
    CHECK_THROWS_AS((void)tab.gamma(100), std::runtime_error);
}

TEST_CASE("pair_distance examples and symmetry") {
    const auto s = ReturnSchedule::linear_multiples({1, 2});
    CHECK(s.pair_distance(3, 3) == 0);
    CHECK(s.pair_distance(2, 5) == 1);
    CHECK(s.pair_distance(0, 9) == 9);
    PhiloxStream rng(99, 0);
    for (int t = 0; t < 200; ++t) {
        const auto k = static_cast<std::int64_t>(rng.next_below(500));
        const auto l = static_cast<std::int64_t>(rng.next_below(500));
        CHECK(s.pair_distance(k, l) == s.pair_distance(l, k));
        CHECK(s.pair_distance(k, l) == oracle::pair_distance_scan(s, k, l));
        CHECK(s.pair_distance(k, k) == 0);
    }
}

TEST_CASE("explicit tables refuse extrapolation") {
    std::vector<std::vector<std::int64_t>> rows(2);
    for (std::int64_t n = 0; n <= 16; ++n) {
        rows[0].push_back(n);
        rows[1].push_back(2 * n + n / 3);
    }
    const auto tab = ReturnSchedule::explicit_table(rows);
    CHECK(tab.q(1, 16) == 16);
    CHECK_THROWS_AS((void)tab.q(1, 17), std::out_of_range);
    CHECK_THROWS_AS((void)tab.gap(2, 1000), std::invalid_argument);  // table shorter than horizon
    CHECK(tab.gap(2).has_value());
}

TEST_CASE("validation rejects malformed families") {
    CHECK_THROWS_AS(ReturnSchedule::linear_multiples({}), std::invalid_argument);
    CHECK_THROWS_AS(ReturnSchedule::linear_multiples({2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(ReturnSchedule::linear_multiples({3, 1}), std::invalid_argument);
    CHECK_THROWS_AS(ReturnSchedule::linear_multiples({0, 1}), std::invalid_argument);
    // decreasing polynomial
    CHECK_THROWS_AS(ReturnSchedule::polynomial({{{1, -1}}}), std::invalid_argument);
    // table with a non-increasing row
    CHECK_THROWS_AS(ReturnSchedule::explicit_table({{0, 1, 1, 2}}), std::invalid_argument);
    // crossing q_1 > q_2 at n = 2
    CHECK_THROWS_AS(ReturnSchedule::explicit_table({{0, 1, 5}, {1, 2, 3}}),
                    std::invalid_argument);
}

TEST_CASE("bounded-difference polynomials need the explicit opt-in") {
    // q_1(n) = n, q_2(n) = n + 5: gap stays 5 forever
    const std::vector<std::vector<std::pair<int, std::int64_t>>> terms{{{1, 1}},
                                                                       {{1, 1}, {0, 5}}};
    CHECK_THROWS_AS(ReturnSchedule::polynomial(terms), std::invalid_argument);
    const auto s = ReturnSchedule::polynomial(terms, /*allow_bounded_gap=*/true);
    CHECK(s.gap(0) == 5);
    CHECK(s.gap(100) == 5);
}

TEST_CASE("mixed-sign polynomial differences still evaluate correctly") {
    // q_1 = 12n, q_2 = n^2 + 37: the difference (n-6)^2 + 1 dips before
    // growing, so the inner minimum is not at k = n
    const std::vector<std::vector<std::pair<int, std::int64_t>>> terms{{{1, 12}},
                                                                       {{2, 1}, {0, 37}}};
    const auto s = ReturnSchedule::polynomial(terms);
    for (std::int64_t n = 0; n <= 30; ++n) CHECK(s.gap(n) == oracle::gap_scan(s, n, 200));
    CHECK(*s.gap(0) == 1);  // attained at k = 6
}

TEST_CASE("overflow in q evaluation is reported, not wrapped") {
    const auto s = ReturnSchedule::polynomial({{{3, 8000}}});
    CHECK(s.q(1, 1024) == 8000ll * 1024 * 1024 * 1024);
    CHECK_THROWS_AS((void)s.q(1, 1'000'000), std::overflow_error);
}
