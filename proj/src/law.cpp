#include "geostop/law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geostop {

std::string tail_kind_name(TailKind k) {
    switch (k) {
        case TailKind::exact_zero: return "exact_zero";
        case TailKind::geometric_tail: return "geometric_tail";
        case TailKind::poisson_tail: return "poisson_tail";
        case TailKind::unknown: return "unknown";
    }
    return "unknown";
}

TailKind tail_kind_from_name(const std::string& name) {
    if (name == "exact_zero") return TailKind::exact_zero;
    if (name == "geometric_tail") return TailKind::geometric_tail;
    if (name == "poisson_tail") return TailKind::poisson_tail;
    if (name == "unknown") return TailKind::unknown;
    throw std::invalid_argument("unknown tail kind: " + name);
}

double DiscreteLaw::explicit_mass() const {
    double s = 0.0;
    for (const double p : pmf) s += p;
    return s;
}

void DiscreteLaw::validate() const {
    for (const double p : pmf)
        if (!(p >= 0.0 && p <= 1.0 + 1e-12))
            throw std::invalid_argument("DiscreteLaw: pmf value outside [0,1]");
    if (tail_mass < -1e-15) throw std::invalid_argument("DiscreteLaw: negative tail mass");
    const double total = explicit_mass() + tail_mass;
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("DiscreteLaw: mass " + std::to_string(total) +
                                    " not within 1e-12 of 1");
}

DiscreteLaw geometric_law(double rho, std::size_t support_cap) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("geometric_law: rho must lie in (0,1]");
    DiscreteLaw law;
    law.pmf.resize(support_cap + 1);
    double term = rho;
    for (std::size_t k = 0; k <= support_cap; ++k) {
        law.pmf[k] = term;
        term *= (1.0 - rho);
    }
    law.tail_mass = std::pow(1.0 - rho, static_cast<double>(support_cap) + 1.0);
    law.tail_kind = TailKind::geometric_tail;
    return law;
}

DiscreteLaw poisson_law(double lambda, std::size_t support_cap, bool allow_heavy_tail) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("poisson_law: lambda must be >= 0");
    DiscreteLaw law;
    law.pmf.resize(support_cap + 1);
    double term = std::exp(-lambda);
    double sum = 0.0;
    for (std::size_t k = 0; k <= support_cap; ++k) {
        law.pmf[k] = term;
        sum += term;
        term *= lambda / static_cast<double>(k + 1);
    }
    law.tail_mass = std::max(0.0, 1.0 - sum);
    law.tail_kind = TailKind::poisson_tail;
    if (!allow_heavy_tail && law.tail_mass >= 1e-12)
        throw std::invalid_argument(
            "poisson_law: truncation tail " + std::to_string(law.tail_mass) +
            " >= 1e-12; raise support_cap or pass allow_heavy_tail");
    return law;
}

TvdInterval tvd(const DiscreteLaw& a, const DiscreteLaw& b) {
    a.validate();
    b.validate();

    // Identical closed-form tails cancel exactly: for the geometric and
    // poisson families the (kind, support length, mass) triple pins the tail
    // distribution, so equal triples mean the tail contributes nothing.
    const bool tails_cancel =
        a.tail_kind == b.tail_kind && a.tail_kind != TailKind::unknown &&
        a.pmf.size() == b.pmf.size() && a.tail_mass == b.tail_mass;

    const std::size_t n = std::max(a.pmf.size(), b.pmf.size());
    const bool a_tail_zero = a.tail_kind == TailKind::exact_zero || a.tail_mass == 0.0;
    const bool b_tail_zero = b.tail_kind == TailKind::exact_zero || b.tail_mass == 0.0;
    double half_l1 = 0.0;
    double unresolved_a = 0.0, unresolved_b = 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        const bool a_explicit = k < a.pmf.size();
        const bool b_explicit = k < b.pmf.size();
        const bool a_known = a_explicit || a_tail_zero;
        const bool b_known = b_explicit || b_tail_zero;
        const double av = a_explicit ? a.pmf[k] : 0.0;
        const double bv = b_explicit ? b.pmf[k] : 0.0;
        if (a_known && b_known) {
            half_l1 += 0.5 * std::fabs(av - bv);
        } else {
            // one side's value sits under an uncertified tail
            if (a_known) unresolved_a += av;
            if (b_known) unresolved_b += bv;
        }
    }

    if (tails_cancel) return {half_l1, half_l1};

    if (!a_tail_zero) unresolved_a += a.tail_mass;
    if (!b_tail_zero) unresolved_b += b.tail_mass;

    const double lo = half_l1 + 0.5 * std::fabs(unresolved_a - unresolved_b);
    const double hi = half_l1 + 0.5 * (unresolved_a + unresolved_b);
    return {std::min(lo, 1.0), std::min(hi, 1.0)};
}

double bernoulli_stopped_parameter(const HazardBernoulliParams& hp) {
    if (!(hp.p > 0.0 && hp.p <= 1.0))
        throw std::invalid_argument("bernoulli_stopped_parameter: p must lie in (0,1]; p=0 never stops");
    if (!(hp.q >= 0.0 && hp.q <= 1.0))
        throw std::invalid_argument("bernoulli_stopped_parameter: q must lie in [0,1]");
    return hp.p / (hp.p + hp.q - hp.p * hp.q);
}

DiscreteLaw bernoulli_stopped_law(const HazardBernoulliParams& hp, std::size_t support_cap) {
    return geometric_law(bernoulli_stopped_parameter(hp), support_cap);
}

double geo_param_gap_bound(double rho_small, double rho_big) {
    if (!(rho_small > 0.0 && rho_small <= rho_big && rho_big < 1.0))
        throw std::invalid_argument("geo_param_gap_bound: need 0 < rho_small <= rho_big < 1");
    return 2.0 * (rho_big - rho_small) / (rho_small * rho_big);
}

double poisson_param_gap_bound(double l1, double l2) {
    if (!(l1 >= 0.0 && l2 >= 0.0))
        throw std::invalid_argument("poisson_param_gap_bound: parameters must be >= 0");
    const double d = std::fabs(l1 - l2);
    return 2.0 * d * std::exp(-d);
}

double hazard_parameter(double q0, double q1, int ell) {
    if (ell < 1) throw std::invalid_argument("hazard_parameter: ell must be >= 1");
    if (!(q0 >= 0.0 && q1 >= 0.0 && (q0 > 0.0 || q1 > 0.0)))
        throw std::invalid_argument("hazard_parameter: q0 and q1 cannot both vanish");
    const double a = std::pow(q0, ell);
    const double b = std::pow(q1, ell);
    return a / (a + b);
}

}  // namespace geostop
