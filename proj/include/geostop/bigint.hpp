#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace geostop {

// Unsigned arbitrary-precision integer, 64-bit limbs, little-endian.
// Just enough arithmetic for continuants, Euclidean digit extraction and
// fixed-point square roots; no signs, no fancy asymptotics.
class BigUint;

// quotient/remainder pair of divmod
struct BigDivMod;

class BigUint {
public:
    BigUint() = default;
    explicit BigUint(std::uint64_t v) {
        if (v) limbs_.push_back(v);
    }

    static BigUint one() { return BigUint(1); }
    static BigUint pow2(std::size_t bits);  // 2^bits

    bool is_zero() const { return limbs_.empty(); }
    std::size_t bit_length() const;
    std::size_t limb_count() const { return limbs_.size(); }

    // -1, 0, +1
    static int compare(const BigUint& a, const BigUint& b);
    bool operator==(const BigUint& o) const { return compare(*this, o) == 0; }
    bool operator<(const BigUint& o) const { return compare(*this, o) < 0; }
    bool operator<=(const BigUint& o) const { return compare(*this, o) <= 0; }

    BigUint& add_assign(const BigUint& o);
    static BigUint add(const BigUint& a, const BigUint& b);
    // requires a >= b
    static BigUint sub(const BigUint& a, const BigUint& b);

    static BigUint mul(const BigUint& a, const BigUint& b);
    static BigUint mul_u64(const BigUint& a, std::uint64_t m);

    BigUint shl(std::size_t bits) const;
    BigUint shr(std::size_t bits) const;

    // Knuth algorithm D; divisor must be nonzero.
    static BigDivMod divmod(const BigUint& num, const BigUint& den);

    // floor(sqrt(n))
    static BigUint isqrt(const BigUint& n);

    // value == frac * 2^exp2 with frac in [0.5, 1); frac == 0 for zero.
    struct Approx {
        double frac = 0.0;
        std::int64_t exp2 = 0;
    };
    Approx to_approx() const;
    double to_double() const;  // +inf if it does not fit
    // fits in u64?
    bool fits_u64() const { return limbs_.size() <= 1; }
    std::uint64_t as_u64() const { return limbs_.empty() ? 0 : limbs_[0]; }

    std::string to_decimal() const;

private:
    void trim();
    std::vector<std::uint64_t> limbs_;
};

struct BigDivMod {
    BigUint quot;
    BigUint rem;
};

// a/b as a double, valid for any magnitudes whose ratio fits a double.
double big_ratio(const BigUint& num, const BigUint& den);

// log2 of the integer, accurate to ~1 ulp of double.
double big_log2(const BigUint& v);

}  // namespace geostop
