#include "geostop/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "geostop/gauss.hpp"
#include "geostop/rng.hpp"

namespace geostop::oracle {

namespace {

bool overlap_matches(std::span<const Symbol> x, std::span<const Symbol> y, std::size_t k) {
    // y laid down k places after x's start; every shared coordinate must agree
    for (std::size_t j = 0; j < y.size(); ++j) {
        const std::size_t pos = k + j;
        if (pos >= x.size()) break;
        if (x[pos] != y[j]) return false;
    }
    return true;
}

}  // namespace

std::size_t self_period_scan(std::span<const Symbol> w) {
    const std::size_t n = w.size();
    for (std::size_t k = 1; k < n; ++k)
        if (overlap_matches(w, w, k)) return k;
    return n;
}

std::size_t cross_period_scan(std::span<const Symbol> a, std::span<const Symbol> b) {
    const std::size_t cap = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < cap; ++k)
        if (overlap_matches(a, b, k) || overlap_matches(b, a, k)) return k;
    return cap;
}

std::size_t kappa_scan(std::span<const Symbol> a, std::span<const Symbol> b) {
    return std::min({cross_period_scan(a, b), self_period_scan(a), self_period_scan(b)});
}

DiscreteLaw stopped_count_dp_law(double p, double q, std::size_t support_cap) {
    if (!(p > 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("stopped_count_dp_law: p in (0,1], q in [0,1]");
    std::vector<double> alive(support_cap + 1, 0.0), next(support_cap + 1, 0.0);
    std::vector<double> absorbed(support_cap + 1, 0.0);
    double alive_overflow = 0.0, absorbed_overflow = 0.0;
    alive[0] = 1.0;
    double alive_mass = 1.0;

    const std::int64_t max_steps =
        p < 1.0 ? static_cast<std::int64_t>(std::ceil(std::log(1e-18) / std::log1p(-p))) + 4 : 2;
    for (std::int64_t step = 0; step < max_steps && alive_mass > 1e-18; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t m = 0; m <= support_cap; ++m) {
            const double a = alive[m];
            if (a == 0.0) continue;
            absorbed[m] += a * p;  // hazard fires; the count at this step is dropped
            const double survive = a * (1.0 - p);
            next[m] += survive * (1.0 - q);
            if (m + 1 <= support_cap)
                next[m + 1] += survive * q;
            else
                alive_overflow += survive * q;
        }
        absorbed_overflow += alive_overflow * p;
        alive_overflow *= (1.0 - p);
        alive.swap(next);
        alive_mass = alive_overflow;
        for (const double a : alive) alive_mass += a;
    }

    DiscreteLaw law;
    law.pmf = std::move(absorbed);
    law.tail_mass = absorbed_overflow + alive_mass;
    law.tail_kind = TailKind::unknown;
    return law;
}

double psi_exhaustive(const ProcessModel& markov, std::int64_t n, int max_m) {
    if (markov.variant() != ProcessModel::Variant::markov)
        throw std::invalid_argument("psi_exhaustive: needs a markov model");
    const std::size_t s = markov.alphabet_size();
    if (s > 2) throw std::invalid_argument("psi_exhaustive: state space too large to enumerate");

    // n-step transition by naive repeated multiplication
    std::vector<double> pn(s * s, 0.0);
    for (std::size_t i = 0; i < s; ++i) pn[i * s + i] = 1.0;
    for (std::int64_t step = 0; step < n; ++step) {
        std::vector<double> nx(s * s, 0.0);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t k = 0; k < s; ++k)
                for (std::size_t j = 0; j < s; ++j)
                    nx[i * s + j] += pn[i * s + k] * markov.transition(k, j);
        pn = std::move(nx);
    }

    const int side2_len = 3;
    double best = 0.0;
    for (int m = 0; m <= max_m; ++m) {
        // enumerate words on each side
        const int len1 = m + 1;
        std::size_t count1 = 1, count2 = 1;
        for (int i = 0; i < len1; ++i) count1 *= s;
        for (int i = 0; i < side2_len; ++i) count2 *= s;
        if (count1 > 8 || count2 > 8)
            throw std::invalid_argument("psi_exhaustive: event algebra too large");

        const auto word_of = [&](std::size_t idx, int len) {
            Word w(len);
            for (int i = len - 1; i >= 0; --i) {
                w[i] = idx % s;
                idx /= s;
            }
            return w;
        };

        std::vector<double> m1(count1), m2(count2);
        std::vector<Word> w1(count1), w2(count2);
        for (std::size_t i = 0; i < count1; ++i) {
            w1[i] = word_of(i, len1);
            m1[i] = markov.cylinder_prob(w1[i]);
        }
        for (std::size_t j = 0; j < count2; ++j) {
            w2[j] = word_of(j, side2_len);
            m2[j] = markov.cylinder_prob(w2[j]);
        }
        std::vector<double> joint(count1 * count2);
        for (std::size_t i = 0; i < count1; ++i)
            for (std::size_t j = 0; j < count2; ++j) {
                const Symbol tail = w1[i][len1 - 1];
                const Symbol head = w2[j][0];
                double cond = pn[tail * s + head];
                for (int t = 1; t < side2_len; ++t) cond *= markov.transition(w2[j][t - 1], w2[j][t]);
                joint[i * count2 + j] = m1[i] * cond;
            }

        for (std::size_t mask1 = 1; mask1 < (std::size_t{1} << count1); ++mask1) {
            double pg = 0.0;
            std::vector<double> row(count2, 0.0);
            for (std::size_t i = 0; i < count1; ++i)
                if (mask1 >> i & 1) {
                    pg += m1[i];
                    for (std::size_t j = 0; j < count2; ++j) row[j] += joint[i * count2 + j];
                }
            if (pg <= 0.0) continue;
            for (std::size_t mask2 = 1; mask2 < (std::size_t{1} << count2); ++mask2) {
                double pd = 0.0, pj = 0.0;
                for (std::size_t j = 0; j < count2; ++j)
                    if (mask2 >> j & 1) {
                        pd += m2[j];
                        pj += row[j];
                    }
                if (pd <= 0.0) continue;
                best = std::max(best, std::fabs(pj / (pg * pd) - 1.0));
            }
        }
    }
    return best;
}

std::optional<std::int64_t> gap_scan(const ReturnSchedule& s, std::int64_t n,
                                     std::int64_t horizon) {
    if (s.ell() == 1) return std::nullopt;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t k = n; k <= horizon; ++k)
        for (int i = 1; i < s.ell(); ++i) best = std::min(best, s.q(i + 1, k) - s.q(i, k));
    return best;
}

std::int64_t gamma_scan(const ReturnSchedule& s, std::int64_t n, std::int64_t bound) {
    if (s.ell() == 1) return 0;
    for (std::int64_t k = 0; k <= bound; ++k) {
        const auto g = gap_scan(s, k, bound + 2 * n + 4);
        if (g && *g >= 2 * n) return k;
    }
    throw std::runtime_error("gamma_scan: not found below bound");
}

std::int64_t pair_distance_scan(const ReturnSchedule& s, std::int64_t k, std::int64_t l) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (int i = 1; i <= s.ell(); ++i)
        for (int j = 1; j <= s.ell(); ++j) {
            const std::int64_t d = s.q(i, k) - s.q(j, l);
            best = std::min(best, d < 0 ? -d : d);
        }
    return best;
}

double tvd_half_l1(const DiscreteLaw& a, const DiscreteLaw& b) {
    const std::size_t n = std::max(a.pmf.size(), b.pmf.size());
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double av = k < a.pmf.size() ? a.pmf[k] : 0.0;
        const double bv = k < b.pmf.size() ? b.pmf[k] : 0.0;
        total += std::fabs(av - bv);
    }
    return 0.5 * total;
}

double tvd_subset_sup(const DiscreteLaw& a, const DiscreteLaw& b) {
    const std::size_t n = std::max(a.pmf.size(), b.pmf.size());
    if (n > 20) throw std::invalid_argument("tvd_subset_sup: support too large to enumerate");
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        double diff = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (mask >> k & 1) {
                const double av = k < a.pmf.size() ? a.pmf[k] : 0.0;
                const double bv = k < b.pmf.size() ? b.pmf[k] : 0.0;
                diff += av - bv;
            }
        best = std::max(best, std::fabs(diff));
    }
    return best;
}

double gauss_measure_quadrature(double lo, double hi, double tol) {
    const auto f = [](double x) { return 1.0 / ((1.0 + x) * std::log(2.0)); };
    const std::function<double(double, double, double, double, double, double)> simpson =
        [&](double a, double b, double fa, double fb, double fm, double eps) -> double {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if (std::fabs(left + right - whole) < 15.0 * eps)
            return left + right + (left + right - whole) / 15.0;
        return simpson(a, m, fa, fm, flm, eps / 2.0) + simpson(m, b, fm, fb, frm, eps / 2.0);
    };
    return simpson(lo, hi, f(lo), f(hi), f(0.5 * (lo + hi)), tol);
}

DiscreteLaw binomial_law(int n, double p) {
    if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_law: bad arguments");
    DiscreteLaw law;
    law.pmf.resize(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double c = 1.0;
        for (int i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
        law.pmf[k] = c * std::pow(p, k) * std::pow(1.0 - p, n - k);
    }
    law.tail_mass = 0.0;
    law.tail_kind = TailKind::exact_zero;
    return law;
}

int run_suite(std::ostream& out, bool quick) {
    int failures = 0;
    const auto check = [&](const char* name, bool ok) {
        out << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
        if (!ok) ++failures;
    };

    {  // word statistics vs direct scans
        bool ok = true;
        for (std::size_t len = 1; len <= 8 && ok; ++len)
            for (std::size_t bits = 0; bits < (std::size_t{1} << len) && ok; ++bits) {
                Word w(len);
                for (std::size_t i = 0; i < len; ++i) w[i] = bits >> i & 1;
                ok = self_period(w) == self_period_scan(w);
            }
        PhiloxStream rng(7, 0);
        const std::uint64_t pairs = quick ? 500 : 5000;
        for (std::uint64_t t = 0; t < pairs && ok; ++t) {
            Word a(1 + rng.next_below(32)), b(1 + rng.next_below(32));
            for (auto& s : a) s = rng.next_below(3);
            for (auto& s : b) s = rng.next_below(3);
            ok = cross_period(a, b) == cross_period_scan(a, b) && kappa(a, b) == kappa_scan(a, b);
        }
        check("word periods match direct shift scans", ok);
    }

    {  // stopped-count law vs the dynamic program
        bool ok = true;
        for (const double p : {0.2, 0.5, 0.8})
            for (const double q : {0.2, 0.5, 0.8}) {
                const auto dp = stopped_count_dp_law(p, q, 200);
                const auto cf = bernoulli_stopped_law({p, q}, 200);
                double sup = 0.0;
                for (std::size_t k = 0; k <= 200; ++k)
                    sup = std::max(sup, std::fabs(dp.pmf[k] - cf.pmf[k]));
                ok = ok && sup < 1e-10;
            }
        check("stopped-count closed form matches the absorbing DP", ok);
    }

    {  // markov psi formula vs exhaustive event enumeration
        const auto chain = ProcessModel::markov({{0.9, 0.1}, {0.1, 0.9}});
        bool ok = true;
        for (std::int64_t n = 1; n <= 3; ++n) {
            const double fast = psi_coefficient(chain, n);
            const double slow = psi_exhaustive(chain, n);
            ok = ok && std::fabs(fast - slow) <= 1e-10 * std::max(1.0, slow);
        }
        check("markov psi formula matches exhaustive supremum", ok);
    }

    {  // schedule gap and gamma vs direct scans
        const auto lin = ReturnSchedule::linear_multiples({1, 2});
        const auto quad = ReturnSchedule::polynomial(
            {{{2, 1}}, {{2, 2}}, {{2, 3}}});  // q_i(n) = i n^2
        bool ok = true;
        for (std::int64_t n = 0; n <= 100 && ok; ++n) {
            ok = gap_scan(lin, n, 400) == lin.gap(n) && gap_scan(quad, n, 400) == quad.gap(n);
        }
        for (std::int64_t n = 1; n <= 40 && ok; ++n) {
            ok = gamma_scan(lin, n, 2000) == lin.gamma(n) &&
                 gamma_scan(quad, n, 2000) == quad.gamma(n);
        }
        check("schedule gap/gamma match direct scans", ok);
    }

    {  // gauss cylinder measures vs quadrature
        const double g1 = cylinder_gauss_measure({1});
        const double g2 = cylinder_gauss_measure({2});
        const bool ok = std::fabs(g1 - gauss_measure_quadrature(0.5, 1.0)) < 1e-12 &&
                        std::fabs(g2 - gauss_measure_quadrature(1.0 / 3.0, 0.5)) < 1e-12;
        check("gauss cylinder measures match quadrature", ok);
    }

    return failures;
}

}  // namespace geostop::oracle
