#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace geostop {

enum class TailKind { exact_zero, geometric_tail, poisson_tail, unknown };

std::string tail_kind_name(TailKind k);
TailKind tail_kind_from_name(const std::string& name);

// Probability mass function on {0, 1, 2, ...} with a dense explicit support
// [0, pmf.size()) and a certified mass above it. The tail kind records where
// that mass came from; "unknown" tails widen total-variation intervals.
struct DiscreteLaw {
    std::vector<double> pmf;
    double tail_mass = 0.0;
    TailKind tail_kind = TailKind::exact_zero;

    double explicit_mass() const;
    // throws when the law is not normalized to within 1e-12
    void validate() const;
};

// [lo, hi] brackets the exact total-variation distance; lo == hi whenever the
// tails resolve (both zero, or identical closed-form tails).
struct TvdInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// Geo(rho){k} = rho * (1-rho)^k on k = 0, 1, ...; rho in (0, 1].
DiscreteLaw geometric_law(double rho, std::size_t support_cap);

// Pois(lambda){k}; by default insists that the truncated tail is < 1e-12.
DiscreteLaw poisson_law(double lambda, std::size_t support_cap, bool allow_heavy_tail = false);

TvdInterval tvd(const DiscreteLaw& a, const DiscreteLaw& b);

// Independent Bernoulli pairs: hazard succeeds w.p. p, count w.p. q.
struct HazardBernoulliParams {
    double p = 0.0;
    double q = 0.0;
};

// Parameter of the geometric law of the stopped count: p / (p + q - p*q).
double bernoulli_stopped_parameter(const HazardBernoulliParams& hp);
DiscreteLaw bernoulli_stopped_law(const HazardBernoulliParams& hp, std::size_t support_cap);

// Upper bound 2*(rho_big - rho_small) / (rho_small * rho_big) for
// d_TV(Geo(rho_big), Geo(rho_small)), rho_small <= rho_big.
double geo_param_gap_bound(double rho_small, double rho_big);

// Upper bound 2*|l1 - l2| * exp(-|l1 - l2|) for d_TV(Pois(l1), Pois(l2)).
double poisson_param_gap_bound(double l1, double l2);

// rho = q0^ell / (q0^ell + q1^ell): the stopped-count geometric parameter
// built from the hazard mass q0 and the count mass q1.
double hazard_parameter(double q0, double q1, int ell);

}  // namespace geostop
