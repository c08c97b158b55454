#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geostop/bigint.hpp"
#include "geostop/rng.hpp"

using namespace geostop;

namespace {
BigUint random_big(PhiloxStream& rng, std::size_t max_limbs) {
    BigUint v;
    const std::size_t limbs = 1 + rng.next_below(max_limbs);
    for (std::size_t i = 0; i < limbs; ++i) {
        v = v.shl(64);
        v.add_assign(BigUint(rng.next_u64()));
    }
    return v;
}
}  // namespace

TEST_CASE("divmod identity: a == q*b + r with r < b") {
    PhiloxStream rng(1001, 0);
    for (int t = 0; t < 2000; ++t) {
        const BigUint a = random_big(rng, 10);
        BigUint b = random_big(rng, 6);
        if (b.is_zero()) b = BigUint(1);
        const auto dm = BigUint::divmod(a, b);
        CHECK(BigUint::compare(dm.rem, b) < 0);
        const BigUint back = BigUint::add(BigUint::mul(dm.quot, b), dm.rem);
        CHECK(back == a);
    }
}

TEST_CASE("divmod exercises the add-back branch territory") {
    // divisors just below a power of two drive qhat corrections
    PhiloxStream rng(77, 0);
    for (int t = 0; t < 500; ++t) {
        const std::size_t bits = 128 + rng.next_below(256);
        BigUint b = BigUint::sub(BigUint::pow2(bits), BigUint(1 + rng.next_below(4)));
        BigUint a = BigUint::mul(b, random_big(rng, 3));
        a.add_assign(random_big(rng, 2));
        const auto dm = BigUint::divmod(a, b);
        CHECK(BigUint::add(BigUint::mul(dm.quot, b), dm.rem) == a);
        CHECK(BigUint::compare(dm.rem, b) < 0);
    }
}

TEST_CASE("ring identities: distributivity and shift/multiply agreement") {
    PhiloxStream rng(5, 0);
    for (int t = 0; t < 1000; ++t) {
        const BigUint a = random_big(rng, 5), b = random_big(rng, 5), c = random_big(rng, 5);
        const BigUint lhs = BigUint::mul(a, BigUint::add(b, c));
        const BigUint rhs = BigUint::add(BigUint::mul(a, b), BigUint::mul(a, c));
        CHECK(lhs == rhs);
        const std::size_t k = rng.next_below(130);
        CHECK(a.shl(k).shr(k) == a);
        CHECK(a.shl(k) == BigUint::mul(a, BigUint::pow2(k)));
        // subtraction inverts addition
        CHECK(BigUint::sub(BigUint::add(a, b), b) == a);
    }
}

TEST_CASE("isqrt: s*s <= n < (s+1)^2") {
    PhiloxStream rng(9, 0);
    for (int t = 0; t < 300; ++t) {
        const BigUint n = random_big(rng, 8);
        const BigUint s = BigUint::isqrt(n);
        CHECK(BigUint::mul(s, s) <= n);
        const BigUint s1 = BigUint::add(s, BigUint(1));
        CHECK(BigUint::compare(n, BigUint::mul(s1, s1)) < 0);
    }
    CHECK(BigUint::isqrt(BigUint(0)).is_zero());
    CHECK(BigUint::isqrt(BigUint(1)) == BigUint(1));
    CHECK(BigUint::isqrt(BigUint(99)) == BigUint(9));
}

TEST_CASE("approximation and logarithms agree with small-case exact values") {
    CHECK(BigUint(12345).to_double() == 12345.0);
    CHECK(big_log2(BigUint::pow2(100)) == doctest::Approx(100.0).epsilon(1e-14));
    PhiloxStream rng(3, 0);
    for (int t = 0; t < 200; ++t) {
        const std::uint64_t x = 1 + (rng.next_u64() >> 12);
        CHECK(big_log2(BigUint(x)) ==
              doctest::Approx(std::log2(static_cast<double>(x))).epsilon(1e-12));
        const std::uint64_t y = 1 + (rng.next_u64() >> 20);
        CHECK(big_ratio(BigUint(x), BigUint(y)) ==
              doctest::Approx(static_cast<double>(x) / static_cast<double>(y)).epsilon(1e-12));
    }
    // ratios spanning huge magnitudes
    const BigUint big = BigUint(3).shl(700);
    CHECK(big_log2(big) == doctest::Approx(700.0 + std::log2(3.0)).epsilon(1e-12));
    CHECK(big_ratio(BigUint::pow2(900), BigUint::pow2(890)) ==
          doctest::Approx(1024.0).epsilon(1e-12));
}

TEST_CASE("decimal rendering round-trips small values") {
    CHECK(BigUint(0).to_decimal() == "0");
    CHECK(BigUint(9876543210123456789ull).to_decimal() == "9876543210123456789");
    // 2^128 = 340282366920938463463374607431768211456
    CHECK(BigUint::pow2(128).to_decimal() == "340282366920938463463374607431768211456");
}
