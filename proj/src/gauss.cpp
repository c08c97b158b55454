#include "geostop/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geostop {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// |log2(N/D)| for positive big integers, switching between a log1p form near
// ratio 1 (where subtracting logarithms would cancel) and a direct difference
// away from it.
double abs_log2_ratio(const BigUint& n, const BigUint& d) {
    const int c = BigUint::compare(n, d);
    if (c == 0) return 0.0;
    const BigUint& hi = c > 0 ? n : d;
    const BigUint& lo = c > 0 ? d : n;
    const BigUint diff = BigUint::sub(hi, lo);
    const auto a = diff.to_approx();
    const auto b = lo.to_approx();
    const std::int64_t scale = a.exp2 - b.exp2;
    if (scale < -2) {
        // x = diff/lo well below 1: log1p path, exact sign handling
        const double x = std::ldexp(a.frac / b.frac, static_cast<int>(scale));
        return std::log1p(x) / kLn2;
    }
    return std::fabs(big_log2(n) - big_log2(d));
}

}  // namespace

Continuants continuants_of(const CFDigits& digits) {
    if (digits.empty()) throw std::invalid_argument("continuants_of: empty digit string");
    Continuants c;
    c.p_prev = BigUint(1);  // p_{-1}
    c.q_prev = BigUint(0);
    c.p = BigUint(0);  // p_0
    c.q = BigUint(1);
    for (const std::uint64_t d : digits) {
        if (d < 1) throw std::invalid_argument("continuants_of: digits must be >= 1");
        BigUint pn = BigUint::add(BigUint::mul_u64(c.p, d), c.p_prev);
        BigUint qn = BigUint::add(BigUint::mul_u64(c.q, d), c.q_prev);
        c.p_prev = std::move(c.p);
        c.q_prev = std::move(c.q);
        c.p = std::move(pn);
        c.q = std::move(qn);
    }
    return c;
}

double cylinder_gauss_measure(const CFDigits& digits) {
    const Continuants c = continuants_of(digits);
    // D = q_n * (q_n + q_{n-1} + p_n + p_{n-1}); the numerator differs by the
    // determinant p_n q_{n-1} - p_{n-1} q_n = +-1.
    BigUint sum = BigUint::add(BigUint::add(c.q, c.q_prev), BigUint::add(c.p, c.p_prev));
    const BigUint d = BigUint::mul(c.q, sum);
    const auto approx = d.to_approx();
    if (approx.exp2 > 900) {
        // measure ~ 1/(D ln 2); may underflow to 0 for very long words
        return std::ldexp(1.0 / (approx.frac * kLn2), static_cast<int>(-approx.exp2));
    }
    const double inv = std::ldexp(1.0 / approx.frac, static_cast<int>(-approx.exp2));
    const BigUint lhs = BigUint::mul(c.p, c.q_prev);
    const BigUint rhs = BigUint::mul(c.p_prev, c.q);
    const bool det_positive = BigUint::compare(lhs, rhs) > 0;
    return det_positive ? std::log1p(inv) / kLn2 : -std::log1p(-inv) / kLn2;
}

double gauss_interval_measure(const BigUint& a, const BigUint& b, const BigUint& c,
                              const BigUint& d) {
    if (b.is_zero() || d.is_zero())
        throw std::invalid_argument("gauss_interval_measure: zero denominator");
    // G([a/b, c/d]) = |log2((1 + c/d)/(1 + a/b))| = |log2((c+d) b / (d (a+b)))|
    const BigUint num = BigUint::mul(BigUint::add(c, d), b);
    const BigUint den = BigUint::mul(d, BigUint::add(a, b));
    return abs_log2_ratio(num, den);
}

double gauss_digit_tail_measure(const CFDigits& digits, std::uint64_t threshold) {
    const Continuants cont = continuants_of(digits);
    // Points in [digits] whose next digit exceeds K fill the subinterval
    // between the endpoint p_n/q_n (next digit -> infinity) and the image of
    // y = 1/(K+1): ((K+1) p_n + p_{n-1}) / ((K+1) q_n + q_{n-1}).
    const BigUint pk = BigUint::add(BigUint::mul_u64(cont.p, threshold + 1), cont.p_prev);
    const BigUint qk = BigUint::add(BigUint::mul_u64(cont.q, threshold + 1), cont.q_prev);
    // order the rationals: p/q vs pk/qk
    const BigUint lhs = BigUint::mul(cont.p, qk);
    const BigUint rhs = BigUint::mul(pk, cont.q);
    if (BigUint::compare(lhs, rhs) <= 0)
        return gauss_interval_measure(cont.p, cont.q, pk, qk);
    return gauss_interval_measure(pk, qk, cont.p, cont.q);
}

double gauss_upsilon() {
    // -ln G[1] = -ln log2(4/3)
    return -std::log(std::log2(4.0 / 3.0));
}

double DyadicPoint::to_double() const {
    if (value.is_zero()) return 0.0;
    const auto a = value.to_approx();
    return std::ldexp(a.frac, static_cast<int>(a.exp2 - static_cast<std::int64_t>(bits)));
}

GaussModel::GaussModel(std::size_t precision_bits, std::size_t max_digits)
    : precision_(precision_bits), max_digits_(max_digits), work_bits_(precision_bits + 64) {
    if (precision_ < 16 || precision_ > 8192)
        throw std::invalid_argument("GaussModel: precision_bits outside [16, 8192]");
    if (max_digits_ < 1) throw std::invalid_argument("GaussModel: max_digits must be >= 1");
    // interval-width sanity: ~1.7 bits of precision feed one digit
    if (static_cast<double>(precision_) < 3.0 * static_cast<double>(max_digits_))
        throw std::invalid_argument(
            "GaussModel: precision too small for max_digits (need ~3 bits per digit)");

    // chain[i] = mantissa of 2^(2^-(i+1)) in [1,2), fixed point with work_bits_
    // fractional bits; each entry is the integer square root of its
    // predecessor shifted up, starting from 2.
    sqrt2_chain_.resize(precision_);
    BigUint cur = BigUint::pow2(work_bits_ + 1);  // 2.0
    for (std::size_t i = 0; i < precision_; ++i) {
        cur = BigUint::isqrt(cur.shl(work_bits_));
        sqrt2_chain_[i] = cur;
    }
}

DyadicPoint GaussModel::exp2_minus_one(const BigUint& u_num) const {
    BigUint acc = BigUint::pow2(work_bits_);  // 1.0
    for (std::size_t j = 0; j < precision_; ++j) {
        // bit j of u carries weight 2^(j - precision), i.e. chain entry
        // precision - 1 - j
        const BigUint shifted = u_num.shr(j);
        if (shifted.is_zero()) break;
        if (shifted.as_u64() & 1)
            acc = BigUint::mul(acc, sqrt2_chain_[precision_ - 1 - j]).shr(work_bits_);
    }
    // fractional part, truncated to precision_ bits
    const BigUint frac = BigUint::sub(acc, BigUint::pow2(work_bits_));
    return {frac.shr(work_bits_ - precision_), precision_};
}

DyadicPoint GaussModel::sample_point(PhiloxStream& rng) const {
    for (int attempt = 0; attempt < 128; ++attempt) {
        // fixed draw count per attempt keeps streams reproducible
        const std::size_t words = (precision_ + 63) / 64;
        BigUint u;
        for (std::size_t w = 0; w < words; ++w) {
            u = u.shl(64);
            u.add_assign(BigUint(rng.next_u64()));
        }
        const std::size_t excess = words * 64 - precision_;
        if (excess) u = u.shr(excess);
        if (u.is_zero()) continue;  // u = 0 maps to the measure-zero boundary x = 0
        DyadicPoint x = exp2_minus_one(u);
        if (!x.value.is_zero()) return x;
    }
    throw std::runtime_error("sample_point: degenerate stream");
}

DigitResult digits_of(const DyadicPoint& x, std::size_t n) {
    if (x.bits == 0) throw std::invalid_argument("digits_of: zero-precision point");
    if (x.value.is_zero()) throw std::invalid_argument("digits_of: x must lie in (0,1)");
    const BigUint den0 = BigUint::pow2(x.bits);
    if (BigUint::compare(x.value, den0) >= 0)
        throw std::invalid_argument("digits_of: x must lie in (0,1)");

    DigitResult out;
    // Euclid on both interval endpoints: digit quotients agree exactly while
    // the whole dyadic interval sits inside one digit cylinder.
    BigUint lo_num = x.value, lo_den = den0;
    BigUint hi_num = BigUint::add(x.value, BigUint(1)), hi_den = den0;
    for (std::size_t i = 0; i < n; ++i) {
        if (lo_num.is_zero() || hi_num.is_zero()) {
            out.status = DigitStatus::terminated;
            return out;
        }
        const auto lo_dm = BigUint::divmod(lo_den, lo_num);
        const auto hi_dm = BigUint::divmod(hi_den, hi_num);
        if (!(lo_dm.quot == hi_dm.quot) || !lo_dm.quot.fits_u64()) {
            out.status = DigitStatus::precision_exhausted;
            return out;
        }
        const std::uint64_t digit = lo_dm.quot.as_u64();
        if (digit == 0) {
            out.status = DigitStatus::precision_exhausted;  // x escaped (0,1); roundoff artifact
            return out;
        }
        out.digits.push_back(digit);
        lo_den = lo_num;
        lo_num = lo_dm.rem;
        hi_den = hi_num;
        hi_num = hi_dm.rem;
    }
    return out;
}

namespace {

// Digit path source for the hazard scan; extends by running Euclid lazily.
class GaussDigitPath {
public:
    GaussDigitPath(const DyadicPoint& x, std::size_t max_digits) : max_digits_(max_digits) {
        lo_num_ = x.value;
        lo_den_ = BigUint::pow2(x.bits);
        hi_num_ = BigUint::add(x.value, BigUint(1));
        hi_den_ = lo_den_;
    }

    bool ensure(std::int64_t upto) {
        while (static_cast<std::int64_t>(digits_.size()) < upto) {
            if (digits_.size() >= max_digits_ || exhausted_) return false;
            if (lo_num_.is_zero() || hi_num_.is_zero()) {
                exhausted_ = true;
                return false;
            }
            const auto lo = BigUint::divmod(lo_den_, lo_num_);
            const auto hi = BigUint::divmod(hi_den_, hi_num_);
            if (!(lo.quot == hi.quot) || !lo.quot.fits_u64() || lo.quot.as_u64() == 0) {
                exhausted_ = true;
                return false;
            }
            digits_.push_back(lo.quot.as_u64());
            lo_den_ = lo_num_;
            lo_num_ = lo.rem;
            hi_den_ = hi_num_;
            hi_num_ = hi.rem;
        }
        return true;
    }

    Symbol operator[](std::int64_t pos) const { return digits_[static_cast<std::size_t>(pos)]; }

private:
    std::size_t max_digits_;
    std::vector<Symbol> digits_;
    BigUint lo_num_, lo_den_, hi_num_, hi_den_;
    bool exhausted_ = false;
};

bool word_match(const GaussDigitPath& path, std::int64_t pos, const CFDigits& w) {
    for (std::size_t j = 0; j < w.size(); ++j)
        if (path[pos + static_cast<std::int64_t>(j)] != w[j]) return false;
    return true;
}

}  // namespace

ExperimentReport gauss_hazard_adapter(const CFDigits& hazard_word, const CFDigits& count_word,
                                      const ReturnSchedule& schedule,
                                      const GaussSimParams& params) {
    if (hazard_word.empty() || count_word.empty())
        throw std::invalid_argument("gauss adapter: words must be nonempty");
    if (hazard_word == count_word)
        throw std::invalid_argument("gauss adapter: hazard and count words must differ");
    for (const auto d : hazard_word)
        if (d < 1) throw std::invalid_argument("gauss adapter: digits must be >= 1");
    for (const auto d : count_word)
        if (d < 1) throw std::invalid_argument("gauss adapter: digits must be >= 1");
    if (params.start_index != 0 && params.start_index != 1)
        throw std::invalid_argument("gauss adapter: start_index must be 0 or 1");

    const double g_hazard = cylinder_gauss_measure(hazard_word);
    const double g_count = cylinder_gauss_measure(count_word);
    const int ell = schedule.ell();
    const double rho = hazard_parameter(g_hazard, g_count, ell);

    std::int64_t step_cap = params.step_cap;
    if (step_cap <= 0) {
        const double p = std::pow(g_hazard, ell);
        step_cap = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::ceil(std::log(1e-6) / std::log1p(-p))), 1000,
            100'000'000);
    }

    const GaussModel model(params.precision_bits, params.max_digits);
    const std::size_t window = std::max(hazard_word.size(), count_word.size()) - 1;

    const auto trial_fn = [&](std::uint64_t t) {
        PhiloxStream rng(params.seed, t);
        const DyadicPoint x = model.sample_point(rng);
        GaussDigitPath path(x, model.max_digits());
        TrialOutcome out;
        for (std::int64_t step = 0; step < step_cap; ++step) {
            const std::int64_t k = params.start_index + step;
            const std::int64_t end =
                schedule.q(ell, k) + static_cast<std::int64_t>(window) + 1;
            if (!path.ensure(end)) {  // digit budget exhausted: censored
                out.steps_used = step;
                return out;
            }
            out.steps_used = step + 1;
            bool hazard = true;
            for (int i = 1; i <= ell && hazard; ++i)
                hazard = word_match(path, schedule.q(i, k), hazard_word);
            if (hazard) {
                out.hazard_hit = true;
                return out;
            }
            bool count = true;
            for (int i = 1; i <= ell && count; ++i)
                count = word_match(path, schedule.q(i, k), count_word);
            out.stopped_count += count ? 1 : 0;
        }
        return out;
    };

    const std::string identity = "gauss seed=" + std::to_string(params.seed) +
                                 " trials=" + std::to_string(params.trials) +
                                 " cap=" + std::to_string(step_cap);
    return aggregate_geometric_report(trial_fn, params.trials, rho, params.seed,
                                      params.bootstrap, params.workers,
                                      params.censoring_budget, identity);
}

}  // namespace geostop
