#include "geostop/bigint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace geostop {

namespace {
using u64 = std::uint64_t;
using u128 = unsigned __int128;
}  // namespace

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint BigUint::pow2(std::size_t bits) {
    BigUint r;
    r.limbs_.assign(bits / 64 + 1, 0);
    r.limbs_.back() = u64{1} << (bits % 64);
    return r;
}

std::size_t BigUint::bit_length() const {
    if (limbs_.empty()) return 0;
    return 64 * (limbs_.size() - 1) + (64 - std::countl_zero(limbs_.back()));
}

int BigUint::compare(const BigUint& a, const BigUint& b) {
    if (a.limbs_.size() != b.limbs_.size())
        return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
    for (std::size_t i = a.limbs_.size(); i-- > 0;) {
        if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
    }
    return 0;
}

BigUint& BigUint::add_assign(const BigUint& o) {
    const std::size_t n = std::max(limbs_.size(), o.limbs_.size());
    limbs_.resize(n, 0);
    u64 carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
        u128 s = static_cast<u128>(limbs_[i]) + (i < o.limbs_.size() ? o.limbs_[i] : 0) + carry;
        limbs_[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
    }
    if (carry) limbs_.push_back(carry);
    return *this;
}

BigUint BigUint::add(const BigUint& a, const BigUint& b) {
    BigUint r = a;
    r.add_assign(b);
    return r;
}

BigUint BigUint::sub(const BigUint& a, const BigUint& b) {
    if (compare(a, b) < 0) throw std::invalid_argument("BigUint::sub underflow");
    BigUint r = a;
    u64 borrow = 0;
    for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
        const u64 bi = (i < b.limbs_.size() ? b.limbs_[i] : 0);
        const u64 ai = r.limbs_[i];
        u64 d = ai - bi;
        const u64 borrow2 = (ai < bi) || (d < borrow);
        d -= borrow;
        r.limbs_[i] = d;
        borrow = borrow2;
    }
    r.trim();
    return r;
}

BigUint BigUint::mul(const BigUint& a, const BigUint& b) {
    if (a.is_zero() || b.is_zero()) return BigUint();
    BigUint r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
        u64 carry = 0;
        const u64 ai = a.limbs_[i];
        for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
            u128 cur = static_cast<u128>(ai) * b.limbs_[j] + r.limbs_[i + j] + carry;
            r.limbs_[i + j] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
        std::size_t k = i + b.limbs_.size();
        while (carry) {
            u128 cur = static_cast<u128>(r.limbs_[k]) + carry;
            r.limbs_[k] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
            ++k;
        }
    }
    r.trim();
    return r;
}

BigUint BigUint::mul_u64(const BigUint& a, u64 m) {
    if (a.is_zero() || m == 0) return BigUint();
    BigUint r;
    r.limbs_.resize(a.limbs_.size());
    u64 carry = 0;
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
        u128 cur = static_cast<u128>(a.limbs_[i]) * m + carry;
        r.limbs_[i] = static_cast<u64>(cur);
        carry = static_cast<u64>(cur >> 64);
    }
    if (carry) r.limbs_.push_back(carry);
    return r;
}

BigUint BigUint::shl(std::size_t bits) const {
    if (is_zero()) return BigUint();
    const std::size_t limb_shift = bits / 64, bit_shift = bits % 64;
    BigUint r;
    r.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        r.limbs_[i + limb_shift] |= bit_shift ? (limbs_[i] << bit_shift) : limbs_[i];
        if (bit_shift)
            r.limbs_[i + limb_shift + 1] |= limbs_[i] >> (64 - bit_shift);
    }
    r.trim();
    return r;
}

BigUint BigUint::shr(std::size_t bits) const {
    const std::size_t limb_shift = bits / 64, bit_shift = bits % 64;
    if (limb_shift >= limbs_.size()) return BigUint();
    BigUint r;
    r.limbs_.assign(limbs_.size() - limb_shift, 0);
    for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
        u64 lo = limbs_[i + limb_shift];
        u64 cur = bit_shift ? (lo >> bit_shift) : lo;
        if (bit_shift && i + limb_shift + 1 < limbs_.size())
            cur |= limbs_[i + limb_shift + 1] << (64 - bit_shift);
        r.limbs_[i] = cur;
    }
    r.trim();
    return r;
}

BigDivMod BigUint::divmod(const BigUint& num, const BigUint& den) {
    if (den.is_zero()) throw std::invalid_argument("BigUint::divmod by zero");
    if (compare(num, den) < 0) return {BigUint(), num};
    if (den.limbs_.size() == 1) {
        const u64 d = den.limbs_[0];
        BigUint q;
        q.limbs_.resize(num.limbs_.size());
        u64 rem = 0;
        for (std::size_t i = num.limbs_.size(); i-- > 0;) {
            u128 cur = (static_cast<u128>(rem) << 64) | num.limbs_[i];
            q.limbs_[i] = static_cast<u64>(cur / d);
            rem = static_cast<u64>(cur % d);
        }
        q.trim();
        return {q, BigUint(rem)};
    }

    // Knuth D on 64-bit limbs.
    const int shift = std::countl_zero(den.limbs_.back());
    BigUint un = num.shl(shift);
    const BigUint vn = den.shl(shift);
    const std::size_t n = vn.limbs_.size();
    un.limbs_.resize(std::max(un.limbs_.size(), num.limbs_.size() + 1), 0);
    const std::size_t m = un.limbs_.size() - n;

    BigUint q;
    q.limbs_.assign(m, 0);
    const u64 vtop = vn.limbs_[n - 1];
    const u64 vnext = vn.limbs_[n - 2];

    for (std::size_t j = m; j-- > 0;) {
        const u128 top = (static_cast<u128>(un.limbs_[j + n]) << 64) | un.limbs_[j + n - 1];
        u128 qhat = top / vtop;
        u128 rhat = top % vtop;
        while (qhat >> 64 ||
               qhat * vnext > ((rhat << 64) | un.limbs_[j + n - 2])) {
            --qhat;
            rhat += vtop;
            if (rhat >> 64) break;
        }
        // multiply & subtract
        u64 borrow = 0, carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const u128 p = qhat * vn.limbs_[i] + carry;
            carry = static_cast<u64>(p >> 64);
            const u64 plo = static_cast<u64>(p);
            const u64 ui = un.limbs_[j + i];
            u64 d = ui - plo;
            const u64 b2 = (ui < plo) || (d < borrow);
            d -= borrow;
            un.limbs_[j + i] = d;
            borrow = b2;
        }
        const u64 utop = un.limbs_[j + n];
        const u128 total = static_cast<u128>(carry) + borrow;
        un.limbs_[j + n] = utop - static_cast<u64>(total);
        if (static_cast<u128>(utop) < total) {
            // qhat was one too large; add the divisor back
            --qhat;
            u64 c2 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const u128 s = static_cast<u128>(un.limbs_[j + i]) + vn.limbs_[i] + c2;
                un.limbs_[j + i] = static_cast<u64>(s);
                c2 = static_cast<u64>(s >> 64);
            }
            un.limbs_[j + n] += c2;
        }
        q.limbs_[j] = static_cast<u64>(qhat);
    }
    q.trim();
    un.limbs_.resize(n);
    un.trim();
    return {q, un.shr(shift)};
}

BigUint BigUint::isqrt(const BigUint& n) {
    if (n.is_zero()) return BigUint();
    BigUint x = pow2((n.bit_length() + 1) / 2);  // >= sqrt(n)
    while (true) {
        BigUint y = divmod(n, x).quot;
        y.add_assign(x);
        y = y.shr(1);
        if (compare(y, x) >= 0) break;
        x = y;
    }
    return x;
}

BigUint::Approx BigUint::to_approx() const {
    if (limbs_.empty()) return {};
    long double v = 0.0L;
    const std::size_t k = limbs_.size();
    for (std::size_t i = k; i-- > (k >= 3 ? k - 3 : 0);) {
        v = v * 0x1.0p64L + static_cast<long double>(limbs_[i]);
    }
    int e = 0;
    v = std::frexp(v, &e);
    const std::int64_t base = 64 * static_cast<std::int64_t>(k >= 3 ? k - 3 : 0);
    return {static_cast<double>(v), base + e};
}

double BigUint::to_double() const {
    const Approx a = to_approx();
    if (a.exp2 > 1023) return std::numeric_limits<double>::infinity();
    return std::ldexp(a.frac, static_cast<int>(a.exp2));
}

std::string BigUint::to_decimal() const {
    if (is_zero()) return "0";
    BigUint cur = *this;
    std::string out;
    const BigUint billion(1000000000ull);
    while (!cur.is_zero()) {
        const auto dm = divmod(cur, billion);
        u64 chunk = dm.rem.as_u64();
        cur = dm.quot;
        for (int i = 0; i < 9; ++i) {
            out.push_back(static_cast<char>('0' + chunk % 10));
            chunk /= 10;
        }
    }
    while (out.size() > 1 && out.back() == '0') out.pop_back();
    std::reverse(out.begin(), out.end());
    return out;
}

double big_ratio(const BigUint& num, const BigUint& den) {
    if (den.is_zero()) throw std::invalid_argument("big_ratio: zero denominator");
    if (num.is_zero()) return 0.0;
    const auto a = num.to_approx();
    const auto b = den.to_approx();
    const long double f = static_cast<long double>(a.frac) / static_cast<long double>(b.frac);
    return static_cast<double>(std::ldexp(f, static_cast<int>(a.exp2 - b.exp2)));
}

double big_log2(const BigUint& v) {
    if (v.is_zero()) throw std::invalid_argument("big_log2 of zero");
    const auto a = v.to_approx();
    return std::log2(a.frac) + static_cast<double>(a.exp2);
}

}  // namespace geostop
