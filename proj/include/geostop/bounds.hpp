#pragma once

#include <cstdint>
#include <utility>

#include "geostop/process.hpp"
#include "geostop/schedule.hpp"

namespace geostop {

// Evaluators for the explicit total-variation bound formulas. The universal
// constant in each of them is proved to exist but never pinned down, so it is
// exposed as c_user (default 1) and every consumer labels the output as a
// bound shape, not a certified bound.
struct BoundInputs {
    double q0 = 0.0;  // hazard mass
    double q1 = 0.0;  // count mass
    int ell = 1;
    std::int64_t M = 1;
    std::int64_t R = 1;
    const MixingProfile* psi = nullptr;
    const ReturnSchedule* schedule = nullptr;
    double c_user = 1.0;
};

// Mixing threshold 2^{1/(ell+1)} - 1 required at psi(R) by the stopped-count
// and fixed-horizon bounds; throws with the offending values when violated.
double psi_threshold_geometric(int ell);
// Threshold (3/2)^{1/(ell+1)} - 1 required at psi(m) by the shift bound.
double psi_threshold_shift(int ell);

// c * [ (1-q0^l)^M + (q0^l + q1^l) * ( (q0+q1) M R + M psi(R) + sum_{n=0}^{M} psi(gap(n)) ) ]
//   + 2 q1^l
double stopped_count_bound(const BoundInputs& b);

// c N q^l (R q + psi(R)) + p(c q^l sum_{n=0}^{N} psi(gap(n))), p(x) = x e^{-x}
double fixed_horizon_bound(double q, int ell, std::int64_t horizon, std::int64_t R,
                 const MixingProfile& psi, const ReturnSchedule& schedule, double c_user);

// c * [ e^{-u k/2} gamma(n v m) + (1 + (p_omega/p_eta)^l) ((n v m) e^{-u k/2} + psi_m^{1/2}) ]
double shift_overlap_bound(double p_omega, double p_eta, int ell, std::int64_t kappa_nm, std::int64_t n,
                    std::int64_t m, double upsilon, std::int64_t gamma_nm, double psi_m,
                    double c_user);

// M = ceil(q0^{-ell} ln(1/q0)); throws when q0 is so large it degenerates.
std::int64_t choose_M(double q0, int ell);

// A concrete (M, R) schedule satisfying the limit requirements as q0 -> 0:
// choose_M above plus the least R with psi(R) <= q0 and R <= q0^{-1/2}.
// Throws when no admissible R exists or q0 is too close to 1.
std::pair<std::int64_t, std::int64_t> choose_MR(double q0, int ell, const MixingProfile& psi);

// x e^{-x}; vanishes at 0, peaks at x = 1 with value 1/e.
double poisson_weight(double x);

}  // namespace geostop
