#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "geostop/bigint.hpp"
#include "geostop/hazard.hpp"
#include "geostop/rng.hpp"
#include "geostop/words.hpp"

namespace geostop {

// Continued-fraction digits c_0, c_1, ... (all >= 1).
using CFDigits = Word;

// Convergents p/q of [0; d_1, ..., d_n] plus the previous pair; exact.
struct Continuants {
    BigUint p_prev, q_prev;  // p_{n-1}, q_{n-1}
    BigUint p, q;            // p_n, q_n
};
Continuants continuants_of(const CFDigits& digits);

// Gauss measure of the cylinder of points whose expansion starts with the
// given digits. Endpoints come from exact integer continuants; the measure
// reduces to |log1p(+-1/D)| / ln 2 with D = q_n (q_n + q_{n-1} + p_n + p_{n-1})
// because consecutive convergents have cross-determinant +-1.
double cylinder_gauss_measure(const CFDigits& digits);

// Gauss measure of the interval between two nonnegative rationals a/b < c/d.
double gauss_interval_measure(const BigUint& a, const BigUint& b, const BigUint& c,
                              const BigUint& d);

// Measure of the union of cylinders [digits, c] over c > threshold (the part
// of [digits] whose next digit exceeds threshold); exact up to rounding.
double gauss_digit_tail_measure(const CFDigits& digits, std::uint64_t threshold);

// Exponential cylinder-decay rate of the Gauss measure: every n-cylinder has
// measure <= exp(-upsilon n) with upsilon = -ln G[1].
double gauss_upsilon();

// A point of (0,1) known to precision_bits binary digits: the dyadic interval
// [value/2^bits, (value+1)/2^bits).
struct DyadicPoint {
    BigUint value;
    std::size_t bits = 0;
    double to_double() const;
};

// Inverse-CDF sample of the Gauss measure: x = 2^u - 1 with u uniform. The
// fixed-point 2^u is a product over set bits of u of iterated square roots of
// 2, precomputed per precision by GaussModel.
class GaussModel {
public:
    explicit GaussModel(std::size_t precision_bits = 512, std::size_t max_digits = 200);

    std::size_t precision_bits() const { return precision_; }
    std::size_t max_digits() const { return max_digits_; }

    DyadicPoint sample_point(PhiloxStream& rng) const;
    // x = 2^(u_num / 2^precision) - 1 for a caller-chosen mantissa; test hook
    // and the deterministic core of sample_point.
    DyadicPoint exp2_minus_one(const BigUint& u_num) const;

private:
    std::size_t precision_;
    std::size_t max_digits_;
    std::size_t work_bits_;
    std::vector<BigUint> sqrt2_chain_;  // 2^(2^-i) mantissas, i = 1..precision
};

enum class DigitStatus {
    ok,                   // requested digits produced and certified
    terminated,           // expansion of the dyadic representative ended (rational)
    precision_exhausted,  // the dyadic interval straddles a digit boundary
};

struct DigitResult {
    CFDigits digits;
    DigitStatus status = DigitStatus::ok;
};

// First n digits of the point's continued-fraction expansion by the Euclidean
// algorithm on the dyadic representative, run in lockstep on both interval
// endpoints; digits are emitted only while the endpoints agree, so every
// reported digit is certain at the given precision.
DigitResult digits_of(const DyadicPoint& x, std::size_t n);

struct GaussSimParams {
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    std::size_t precision_bits = 512;
    std::size_t max_digits = 200;
    std::int64_t step_cap = 0;  // <= 0: auto
    int start_index = 0;
    BootstrapSpec bootstrap;
    int workers = 0;
    double censoring_budget = 1e-4;
};

// Hazard run over the digit process of Gauss-distributed points: counts
// returns of the count word until the hazard word first returns at all
// scheduled probes. Digit-budget exhaustion censors the trial.
ExperimentReport gauss_hazard_adapter(const CFDigits& hazard_word, const CFDigits& count_word,
                                      const ReturnSchedule& schedule,
                                      const GaussSimParams& params);

}  // namespace geostop
