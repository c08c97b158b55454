#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace geostop {

enum class ScheduleKind { linear_multiples, polynomial, explicit_table };

// The family q_1 < q_2 < ... < q_ell of strictly increasing integer return
// times, plus the derived quantities consumed by the limit theorems:
//   gap(n)  = min over k >= n of the smallest difference q_{i+1}(k) - q_i(k)
//             (+infinity when ell == 1, reported as nullopt),
//   gamma(n) = first k with gap(k) >= 2n,
//   pair_distance(k, l) = min over i, j of |q_i(k) - q_j(l)|.
//
// gap is a running minimum, hence nondecreasing, and must diverge for the
// theorems to apply. Built-in kinds either evaluate the inner minimum
// analytically (difference nondecreasing in k) or scan to a horizon with a
// soundness certificate; schedules whose gap stays bounded are rejected
// unless constructed with allow_bounded_gap.
class ReturnSchedule {
public:
    static constexpr std::int64_t kDefaultHorizon = 1'000'000;

    // q_i(n) = coeffs[i-1] * n, coefficients strictly increasing and positive.
    static ReturnSchedule linear_multiples(std::vector<std::int64_t> coeffs);

    // terms[i-1] lists (degree, coeff) pairs of q_i; integer coefficients.
    static ReturnSchedule polynomial(
        std::vector<std::vector<std::pair<int, std::int64_t>>> terms,
        bool allow_bounded_gap = false);

    // values[i-1][n] = q_i(n); refuses any evaluation past the table.
    static ReturnSchedule explicit_table(std::vector<std::vector<std::int64_t>> values);

    int ell() const { return ell_; }
    ScheduleKind kind() const { return kind_; }

    // 1-based function index.
    std::int64_t q(int i, std::int64_t n) const;

    // nullopt encodes +infinity (ell == 1: empty inner minimum).
    std::optional<std::int64_t> gap(std::int64_t n) const;
    std::optional<std::int64_t> gap(std::int64_t n, std::int64_t horizon) const;

    std::int64_t gamma(std::int64_t n) const;
    std::int64_t gamma(std::int64_t n, std::int64_t search_bound) const;

    std::int64_t pair_distance(std::int64_t k, std::int64_t l) const;

    // Largest n the schedule can be evaluated at (table length bound).
    std::int64_t max_index() const;

private:
    ReturnSchedule() = default;
    void validate(bool allow_bounded_gap);
    std::int64_t min_diff_at(std::int64_t k) const;

    ScheduleKind kind_ = ScheduleKind::linear_multiples;
    int ell_ = 0;
    std::vector<std::int64_t> coeffs_;                 // linear_multiples
    std::vector<std::vector<std::int64_t>> poly_;      // coeff by degree, per i
    std::vector<std::vector<std::int64_t>> table_;     // per i
    bool diffs_monotone_ = false;  // inner min attained at k = n
    std::int64_t scan_safe_from_ = 0;  // beyond this, diffs are increasing
};

}  // namespace geostop
