#include "geostop/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace geostop {

namespace {

std::int64_t checked_i64(unsigned __int128 magnitude, bool negative, const char* what) {
    if (magnitude > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max()))
        throw std::overflow_error(std::string(what) + ": value exceeds 64-bit range");
    const auto v = static_cast<std::int64_t>(magnitude);
    return negative ? -v : v;
}

std::int64_t eval_poly(const std::vector<std::int64_t>& coeff_by_degree, std::int64_t n,
                       const char* what) {
    __int128 acc = 0;
    for (std::size_t d = coeff_by_degree.size(); d-- > 0;) {
        acc = acc * n + coeff_by_degree[d];
        if (acc > std::numeric_limits<std::int64_t>::max() ||
            acc < std::numeric_limits<std::int64_t>::min())
            throw std::overflow_error(std::string(what) + ": polynomial overflow");
    }
    return static_cast<std::int64_t>(acc);
}

}  // namespace

ReturnSchedule ReturnSchedule::linear_multiples(std::vector<std::int64_t> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("schedule: need at least one coefficient");
    ReturnSchedule s;
    s.kind_ = ScheduleKind::linear_multiples;
    s.ell_ = static_cast<int>(coeffs.size());
    s.coeffs_ = std::move(coeffs);
    for (std::size_t i = 0; i < s.coeffs_.size(); ++i) {
        if (s.coeffs_[i] <= 0)
            throw std::invalid_argument("schedule: linear coefficients must be positive");
        if (i > 0 && s.coeffs_[i] <= s.coeffs_[i - 1])
            throw std::invalid_argument("schedule: linear coefficients must be strictly increasing");
    }
    s.diffs_monotone_ = true;
    s.validate(false);
    return s;
}

ReturnSchedule ReturnSchedule::polynomial(
    std::vector<std::vector<std::pair<int, std::int64_t>>> terms, bool allow_bounded_gap) {
    if (terms.empty()) throw std::invalid_argument("schedule: need at least one function");
    ReturnSchedule s;
    s.kind_ = ScheduleKind::polynomial;
    s.ell_ = static_cast<int>(terms.size());
    s.poly_.resize(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        for (const auto& [deg, coeff] : terms[i]) {
            if (deg < 0 || deg > 16)
                throw std::invalid_argument("schedule: polynomial degree out of range [0,16]");
            if (s.poly_[i].size() <= static_cast<std::size_t>(deg)) s.poly_[i].resize(deg + 1, 0);
            s.poly_[i][deg] += coeff;
        }
        while (!s.poly_[i].empty() && s.poly_[i].back() == 0) s.poly_[i].pop_back();
        if (s.poly_[i].empty()) s.poly_[i].push_back(0);
    }
    s.validate(allow_bounded_gap);
    return s;
}

ReturnSchedule ReturnSchedule::explicit_table(std::vector<std::vector<std::int64_t>> values) {
    if (values.empty()) throw std::invalid_argument("schedule: need at least one table row");
    ReturnSchedule s;
    s.kind_ = ScheduleKind::explicit_table;
    s.ell_ = static_cast<int>(values.size());
    s.table_ = std::move(values);
    const std::size_t len = s.table_[0].size();
    if (len < 2) throw std::invalid_argument("schedule: table needs at least two entries");
    for (const auto& row : s.table_)
        if (row.size() != len)
            throw std::invalid_argument("schedule: table rows must have equal length");
    s.validate(false);
    return s;
}

void ReturnSchedule::validate(bool allow_bounded_gap) {
    // Strict increase of each q_i and ordering across i. Ordering may be
    // non-strict at n = 0 only (the canonical q_i(n) = a_i*n family ties there).
    const std::int64_t probe_end =
        kind_ == ScheduleKind::explicit_table ? max_index() : std::min<std::int64_t>(1024, max_index());
    for (std::int64_t n = 0; n <= probe_end; ++n) {
        std::int64_t prev = -1;
        for (int i = 1; i <= ell_; ++i) {
            const std::int64_t v = q(i, n);
            if (v < 0) throw std::invalid_argument("schedule: q values must be nonnegative");
            if (i > 1) {
                if (n == 0 ? v < prev : v <= prev)
                    throw std::invalid_argument(
                        "schedule: q_i(n) must be strictly ordered in i (n=" + std::to_string(n) + ")");
            }
            if (n > 0 && q(i, n) <= q(i, n - 1))
                throw std::invalid_argument("schedule: q_" + std::to_string(i) +
                                            " is not strictly increasing at n=" + std::to_string(n));
            prev = v;
        }
    }

    if (kind_ == ScheduleKind::polynomial && ell_ >= 2) {
        // Classify the difference polynomials d_i = q_{i+1} - q_i.
        bool all_nonneg = true;
        std::int64_t safe_from = 0;
        for (int i = 0; i + 1 < ell_; ++i) {
            const auto& lo = poly_[i];
            const auto& hi = poly_[i + 1];
            std::vector<std::int64_t> d(std::max(lo.size(), hi.size()), 0);
            for (std::size_t k = 0; k < d.size(); ++k) {
                if (k < hi.size()) d[k] += hi[k];
                if (k < lo.size()) d[k] -= lo[k];
            }
            while (!d.empty() && d.back() == 0) d.pop_back();
            if (d.empty() || (d.size() == 1 && d[0] <= 0))
                throw std::invalid_argument("schedule: difference q_" + std::to_string(i + 2) +
                                            " - q_" + std::to_string(i + 1) + " is not positive");
            if (d.size() == 1) {
                // constant difference: gap stays bounded, theorems need it to diverge
                if (!allow_bounded_gap)
                    throw std::invalid_argument(
                        "schedule: bounded difference q_{i+1}-q_i (gap does not diverge); "
                        "pass allow_bounded_gap to use anyway");
            }
            for (const auto c : d)
                if (c < 0) all_nonneg = false;
            if (d.back() < 0)
                throw std::invalid_argument("schedule: difference polynomial eventually negative");
            // Cauchy bound on roots of the derivative: beyond it d_i increases.
            if (d.size() >= 2) {
                const int deg = static_cast<int>(d.size()) - 1;
                double bound = 0.0;
                for (int k = 1; k < deg; ++k)
                    bound = std::max(bound, std::fabs(static_cast<double>(k) * d[k]) /
                                                (static_cast<double>(deg) * d[deg]));
                safe_from = std::max<std::int64_t>(safe_from, static_cast<std::int64_t>(bound) + 2);
            }
        }
        diffs_monotone_ = all_nonneg;
        scan_safe_from_ = safe_from;
    }
}

std::int64_t ReturnSchedule::max_index() const {
    if (kind_ == ScheduleKind::explicit_table)
        return static_cast<std::int64_t>(table_[0].size()) - 1;
    return std::numeric_limits<std::int64_t>::max() / 2;
}

std::int64_t ReturnSchedule::q(int i, std::int64_t n) const {
    if (i < 1 || i > ell_) throw std::out_of_range("schedule: function index out of range");
    if (n < 0) throw std::out_of_range("schedule: negative index");
    switch (kind_) {
        case ScheduleKind::linear_multiples: {
            const unsigned __int128 m =
                static_cast<unsigned __int128>(coeffs_[i - 1]) * static_cast<std::uint64_t>(n);
            return checked_i64(m, false, "schedule");
        }
        case ScheduleKind::polynomial:
            return eval_poly(poly_[i - 1], n, "schedule");
        case ScheduleKind::explicit_table:
            if (static_cast<std::size_t>(n) >= table_[i - 1].size())
                throw std::out_of_range("schedule: index " + std::to_string(n) +
                                        " beyond explicit table (no extrapolation)");
            return table_[i - 1][n];
    }
    throw std::logic_error("schedule: unknown kind");
}

std::int64_t ReturnSchedule::min_diff_at(std::int64_t k) const {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::int64_t prev = q(1, k);
    for (int i = 2; i <= ell_; ++i) {
        const std::int64_t cur = q(i, k);
        best = std::min(best, cur - prev);
        prev = cur;
    }
    return best;
}

std::optional<std::int64_t> ReturnSchedule::gap(std::int64_t n) const {
    const std::int64_t horizon =
        kind_ == ScheduleKind::explicit_table ? max_index() : kDefaultHorizon;
    return gap(n, horizon);
}

std::optional<std::int64_t> ReturnSchedule::gap(std::int64_t n, std::int64_t horizon) const {
    if (n < 0) throw std::out_of_range("schedule: negative index");
    if (ell_ == 1) return std::nullopt;  // empty minimum: +infinity
    if (n > horizon) throw std::invalid_argument("schedule: gap needs n <= horizon");
    if (kind_ == ScheduleKind::explicit_table && horizon > max_index())
        throw std::invalid_argument("schedule: explicit table shorter than requested horizon");

    if (diffs_monotone_) return min_diff_at(n);

    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t k = n; k <= horizon; ++k) {
        best = std::min(best, min_diff_at(k));
        if (kind_ == ScheduleKind::polynomial && k >= scan_safe_from_)
            return best;  // every difference is nondecreasing past this point
    }
    if (kind_ == ScheduleKind::explicit_table) return best;  // table is the whole function
    throw std::runtime_error(
        "schedule: cannot certify the inner minimum within horizon " + std::to_string(horizon) +
        "; increase the horizon");
}

std::int64_t ReturnSchedule::gamma(std::int64_t n) const {
    const std::int64_t bound =
        kind_ == ScheduleKind::explicit_table ? max_index() : kDefaultHorizon;
    return gamma(n, bound);
}

std::int64_t ReturnSchedule::gamma(std::int64_t n, std::int64_t search_bound) const {
    if (n < 1) throw std::invalid_argument("schedule: gamma needs n >= 1");
    if (ell_ == 1) return 0;  // gap is +infinity everywhere
    const std::int64_t want = 2 * n;
    const auto at = [&](std::int64_t k) {
        const auto g = gap(k, std::max(k, search_bound));
        return g && *g >= want;
    };
    if (!at(search_bound))
        throw std::runtime_error("schedule: no k <= " + std::to_string(search_bound) +
                                 " with gap(k) >= " + std::to_string(want));
    // gap is nondecreasing, so the first admissible k is found by bisection.
    std::int64_t lo = 0, hi = search_bound;
    if (at(0)) return 0;
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (at(mid) ? hi : lo) = mid;
    }
    return hi;
}

std::int64_t ReturnSchedule::pair_distance(std::int64_t k, std::int64_t l) const {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (int i = 1; i <= ell_; ++i) {
        const std::int64_t qi = q(i, k);
        for (int j = 1; j <= ell_; ++j) {
            const std::int64_t d = qi - q(j, l);
            best = std::min(best, d < 0 ? -d : d);
        }
    }
    return best;
}

}  // namespace geostop
