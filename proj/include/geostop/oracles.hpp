#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>

#include "geostop/law.hpp"
#include "geostop/process.hpp"
#include "geostop/schedule.hpp"
#include "geostop/words.hpp"

namespace geostop::oracle {

// Brute-force references, deliberately written without touching the fast
// paths they exist to check.

// direct shift scan over k in [1, n]
std::size_t self_period_scan(std::span<const Symbol> w);
// direct two-direction scan over k in [0, min(n,m)]
std::size_t cross_period_scan(std::span<const Symbol> a, std::span<const Symbol> b);
std::size_t kappa_scan(std::span<const Symbol> a, std::span<const Symbol> b);

// Law of the stopped count for independent Bernoulli hazard/count pairs, by
// dynamic programming over (step, count) states with hazard absorption. The
// leftover probability of counts above support_cap lands in the unknown tail.
DiscreteLaw stopped_count_dp_law(double p, double q, std::size_t support_cap);

// Exhaustive psi coefficient: supremum of |P(G cap D)/(P(G)P(D)) - 1| over
// all events G on coordinates [0, m] and D on coordinates [m+n, m+n+2],
// m <= max_m, enumerated as subsets of the word atoms. Feasible for tiny
// state spaces only.
double psi_exhaustive(const ProcessModel& markov, std::int64_t n, int max_m = 2);

// min over k in [n, horizon] of consecutive q differences, by direct loops.
std::optional<std::int64_t> gap_scan(const ReturnSchedule& s, std::int64_t n,
                                     std::int64_t horizon);
std::int64_t gamma_scan(const ReturnSchedule& s, std::int64_t n, std::int64_t bound);
std::int64_t pair_distance_scan(const ReturnSchedule& s, std::int64_t k, std::int64_t l);

// Plain truncated half-L1 distance, reading absent entries as zero. Valid
// oracle when both laws carry negligible tails.
double tvd_half_l1(const DiscreteLaw& a, const DiscreteLaw& b);

// sup over subsets G of |a(G) - b(G)|, enumerated exhaustively; supports
// must be small (<= ~20 combined entries).
double tvd_subset_sup(const DiscreteLaw& a, const DiscreteLaw& b);

// adaptive Simpson quadrature of the Gauss density 1/((1+x) ln 2)
double gauss_measure_quadrature(double lo, double hi, double tol = 1e-14);

// exact Binomial(n, p) law
DiscreteLaw binomial_law(int n, double p);

// Runs the cross-check suites and prints one line per check; returns the
// number of failures.
int run_suite(std::ostream& out, bool quick);

}  // namespace geostop::oracle
