#include "geostop/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace geostop {

namespace {

void require_psi_below(double psi_value, double threshold, const char* where) {
    if (!(psi_value < threshold))
        throw std::invalid_argument(std::string(where) + ": psi value " +
                                    std::to_string(psi_value) +
                                    " must be below the mixing threshold " +
                                    std::to_string(threshold));
}

// Term-by-term sum of psi(gap(n)); an infinite gap (single-return schedules)
// contributes 0 and a zero gap (schedules that tie at n = 0) is clamped to
// psi(1), the smallest separation psi is defined at.
double psi_gap_sum(const MixingProfile& psi, const ReturnSchedule& schedule, std::int64_t upto) {
    double total = 0.0;
    for (std::int64_t n = 0; n <= upto; ++n) {
        auto g = schedule.gap(n);
        if (g && *g < 1) g = 1;
        total += psi.psi_at_gap(g);
    }
    return total;
}

}  // namespace

double poisson_weight(double x) { return x * std::exp(-x); }

double psi_threshold_geometric(int ell) {
    return std::pow(2.0, 1.0 / (static_cast<double>(ell) + 1.0)) - 1.0;
}

double psi_threshold_shift(int ell) {
    return std::pow(1.5, 1.0 / (static_cast<double>(ell) + 1.0)) - 1.0;
}

double stopped_count_bound(const BoundInputs& b) {
    if (!b.psi || !b.schedule) throw std::invalid_argument("stopped_count_bound: missing psi or schedule");
    if (b.M < 1 || b.R < 1) throw std::invalid_argument("stopped_count_bound: M and R must be >= 1");
    if (!(b.q0 >= 0.0 && b.q0 <= 1.0 && b.q1 >= 0.0 && b.q1 <= 1.0))
        throw std::invalid_argument("stopped_count_bound: masses must lie in [0,1]");
    if (b.c_user <= 0.0) throw std::invalid_argument("stopped_count_bound: c_user must be positive");
    require_psi_below(b.psi->psi(b.R), psi_threshold_geometric(b.ell), "stopped_count_bound");

    const double q0l = std::pow(b.q0, b.ell);
    const double q1l = std::pow(b.q1, b.ell);
    const double geometric_term = std::pow(1.0 - q0l, static_cast<double>(b.M));
    const double mr_term = (b.q0 + b.q1) * static_cast<double>(b.M) * static_cast<double>(b.R);
    const double psi_terms = static_cast<double>(b.M) * b.psi->psi(b.R) +
                             psi_gap_sum(*b.psi, *b.schedule, b.M);
    return b.c_user * (geometric_term + (q0l + q1l) * (mr_term + psi_terms)) + 2.0 * q1l;
}

double fixed_horizon_bound(double q, int ell, std::int64_t horizon, std::int64_t R,
                 const MixingProfile& psi, const ReturnSchedule& schedule, double c_user) {
    if (horizon < R || R < 1)
        throw std::invalid_argument("fixed_horizon_bound: need 1 <= R <= horizon");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("fixed_horizon_bound: mass must lie in [0,1]");
    if (c_user <= 0.0) throw std::invalid_argument("fixed_horizon_bound: c_user must be positive");
    require_psi_below(psi.psi(R), psi_threshold_geometric(ell), "fixed_horizon_bound");

    const double ql = std::pow(q, ell);
    const double first = c_user * static_cast<double>(horizon) * ql *
                         (static_cast<double>(R) * q + psi.psi(R));
    const double second = poisson_weight(c_user * ql * psi_gap_sum(psi, schedule, horizon));
    return first + second;
}

double shift_overlap_bound(double p_omega, double p_eta, int ell, std::int64_t kappa_nm, std::int64_t n,
                    std::int64_t m, double upsilon, std::int64_t gamma_nm, double psi_m,
                    double c_user) {
    if (!(p_omega > 0.0 && p_eta > 0.0))
        throw std::invalid_argument("shift_overlap_bound: cylinder masses must be positive");
    if (upsilon <= 0.0) throw std::invalid_argument("shift_overlap_bound: upsilon must be positive");
    if (kappa_nm < 0 || gamma_nm < 0 || n < 1 || m < 1)
        throw std::invalid_argument("shift_overlap_bound: negative overlap/burn-in arguments");
    if (c_user <= 0.0) throw std::invalid_argument("shift_overlap_bound: c_user must be positive");
    require_psi_below(psi_m, psi_threshold_shift(ell), "shift_overlap_bound");

    const double decay = std::exp(-0.5 * upsilon * static_cast<double>(kappa_nm));
    const double ratio_term = 1.0 + std::pow(p_omega / p_eta, ell);
    const double nm = static_cast<double>(std::max(n, m));
    return c_user * (decay * static_cast<double>(gamma_nm) +
                     ratio_term * (nm * decay + std::sqrt(psi_m)));
}

std::int64_t choose_M(double q0, int ell) {
    if (!(q0 > 0.0 && q0 < 1.0)) throw std::invalid_argument("choose_M: q0 must lie in (0,1)");
    const double m_raw = std::pow(q0, -ell) * std::log(1.0 / q0);
    if (m_raw < 1.0)
        throw std::invalid_argument(
            "choose_M: q0 too close to 1, the (M, R) schedule degenerates (M would be 0)");
    if (m_raw > 9.0e18) throw std::invalid_argument("choose_M: M overflows; q0 too small");
    return static_cast<std::int64_t>(std::ceil(m_raw));
}

std::pair<std::int64_t, std::int64_t> choose_MR(double q0, int ell, const MixingProfile& psi) {
    const std::int64_t M = choose_M(q0, ell);

    const auto r_cap =
        static_cast<std::int64_t>(std::max(1.0, std::floor(1.0 / std::sqrt(q0))));
    for (std::int64_t R = 1; R <= r_cap; ++R)
        if (psi.psi(R) <= q0) return {M, R};
    throw std::runtime_error("choose_MR: no R <= " + std::to_string(r_cap) +
                             " with psi(R) <= " + std::to_string(q0) +
                             "; mixing too slow for this target mass");
}

}  // namespace geostop
