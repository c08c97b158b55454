#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geostop/oracles.hpp"
#include "geostop/rng.hpp"
#include "geostop/words.hpp"

using namespace geostop;

namespace {
Word spiked(std::size_t n, Symbol head) {
    Word w(n, 0);
    w[0] = head;
    return w;
}
}  // namespace

TEST_CASE("self_period: named examples") {
    for (std::size_t n = 1; n <= 12; ++n) CHECK(self_period(spiked(n, 1)) == n);
    CHECK(self_period(Word{7, 7, 7, 7}) == 1);
    CHECK(self_period(Word{0, 1, 0, 1}) == 2);
    CHECK(self_period(Word{0, 1, 0}) == 2);
}

TEST_CASE("cross_period: named examples") {
    const Word a{0, 1, 2, 0};
    CHECK(cross_period(a, a) == 0);
    for (std::size_t n = 2; n <= 12; ++n)
        CHECK(cross_period(spiked(n, 1), spiked(n, 2)) == n);
    CHECK(cross_period(Word{0, 1}, Word{1, 0}) == 1);
}

TEST_CASE("kappa: named examples") {
    CHECK(kappa(Word{3, 3, 3}, Word{3, 3, 3}) == 0);
    for (std::size_t n = 1; n <= 12; ++n) CHECK(kappa(spiked(n, 1), spiked(n, 2)) == n);
}

TEST_CASE("exhaustive: all binary words up to length 12 match the scan oracle") {
    for (std::size_t len = 1; len <= 12; ++len) {
        for (std::size_t bits = 0; bits < (std::size_t{1} << len); ++bits) {
            Word w(len);
            for (std::size_t i = 0; i < len; ++i) w[i] = bits >> i & 1;
            CHECK(self_period(w) == oracle::self_period_scan(w));
            // border characterization: period n iff no nonempty proper border
            bool has_border = false;
            for (std::size_t b = 1; b < len && !has_border; ++b) {
                has_border = true;
                for (std::size_t i = 0; i < b; ++i)
                    if (w[i] != w[len - b + i]) {
                        has_border = false;
                        break;
                    }
            }
            CHECK((self_period(w) == len) == !has_border);
        }
    }
}

TEST_CASE("random ternary words up to length 64 match the scan oracle") {
    PhiloxStream rng(515, 0);
    for (int t = 0; t < 10000; ++t) {
        Word a(1 + rng.next_below(64)), b(1 + rng.next_below(64));
        for (auto& s : a) s = rng.next_below(3);
        for (auto& s : b) s = rng.next_below(3);
        REQUIRE(self_period(a) == oracle::self_period_scan(a));
        REQUIRE(cross_period(a, b) == oracle::cross_period_scan(a, b));
        REQUIRE(kappa(a, b) == oracle::kappa_scan(a, b));
    }
}

TEST_CASE("structural properties of the period quantities") {
    PhiloxStream rng(99, 3);
    for (int t = 0; t < 2000; ++t) {
        Word a(1 + rng.next_below(24)), b(1 + rng.next_below(24));
        for (auto& s : a) s = rng.next_below(2);
        for (auto& s : b) s = rng.next_below(2);
        const auto cp = cross_period(a, b);
        CHECK(cp == cross_period(b, a));
        CHECK(cp <= std::min(a.size(), b.size()));
        CHECK(cross_period(a, a) == 0);
        CHECK(kappa(a, b) <= self_period(a));
        CHECK(kappa(a, b) <= self_period(b));
    }
}

TEST_CASE("nested words can be compatible earlier than the length cap") {
    // b extends a's shift: a = (0,1), b = (1,0,1): shift 1 of b against a
    // works in the b-direction, so the cross period is 1, not min(n, m)
    CHECK(cross_period(Word{0, 1}, Word{1, 0, 1}) == 1);
    CHECK(compatible_at_shift(Word{1, 0, 1}, Word{0, 1}, 1));
}

TEST_CASE("empty words are rejected") {
    CHECK_THROWS_AS((void)self_period(Word{}), std::invalid_argument);
    CHECK_THROWS_AS((void)cross_period(Word{}, Word{1}), std::invalid_argument);
}
