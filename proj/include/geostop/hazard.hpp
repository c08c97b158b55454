#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geostop/law.hpp"
#include "geostop/process.hpp"
#include "geostop/schedule.hpp"
#include "geostop/words.hpp"

namespace geostop {

// Either two disjoint symbol sets (hazard set, count set) or two distinct
// words matched in full at every probe position.
struct TargetSpec {
    bool word_mode = false;
    std::vector<Symbol> hazard_set;
    std::vector<Symbol> count_set;
    Word hazard_word;
    Word count_word;

    void validate(std::size_t alphabet_size) const;
    std::size_t probe_window() const;  // extra positions a probe reads past q_i(k)
};

struct BootstrapSpec {
    std::uint32_t resamples = 1000;
    double level = 0.95;
};

struct HazardExperimentConfig {
    std::shared_ptr<const ProcessModel> model;
    ReturnSchedule schedule = ReturnSchedule::linear_multiples({1});
    TargetSpec targets;
    std::uint64_t trials = 1;
    std::int64_t step_cap = 0;  // <= 0: auto from the hazard step probability
    int start_index = 0;        // first scanned step, 0 or 1
    std::uint64_t seed = 0;
    double censoring_budget = 1e-4;
    BootstrapSpec bootstrap;
    int workers = 0;  // 0: hardware concurrency
    std::int64_t path_budget = 50'000'000;

    void validate() const;
    std::int64_t resolved_step_cap() const;
    double hazard_step_prob() const;  // i.i.d.-approximation of P{hazard at a step}
    double target_rho() const;        // geometric parameter from model masses
};

struct TrialOutcome {
    std::uint64_t stopped_count = 0;
    bool hazard_hit = false;
    std::int64_t steps_used = 0;
};

// Counts per stopped-count value plus censored trials, tagged with the
// experiment identity so only shards of the same run can merge.
struct Histogram {
    std::vector<std::uint64_t> counts;
    std::uint64_t censored = 0;
    std::uint64_t total = 0;
    std::string identity;

    void record(const TrialOutcome& out);
};

Histogram empirical_merge(const Histogram& a, const Histogram& b);

struct ExperimentReport {
    DiscreteLaw empirical;
    DiscreteLaw target;
    double rho_used = 0.0;  // geometric rho, or poisson lambda for horizon runs
    TvdInterval tvd_interval;
    double bootstrap_level = 0.0;
    TvdInterval bootstrap_ci;
    double censored_fraction = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    double wall_time_sec = 0.0;
    bool censoring_budget_exceeded = false;
    Histogram histogram;
    std::vector<std::string> warnings;
};

// One multiple-return indicator: 1 iff every probe at q_1(k), ..., q_ell(k)
// lands in the target (set membership, or a full word match starting there).
// Probing past the end of the span throws instead of silently reading 0.
int indicator(std::span<const Symbol> path, const ReturnSchedule& schedule, std::int64_t k,
              const TargetSpec& targets, bool hazard);

// Stopped count on a fully materialized path; used by the exact small-case
// enumerations and hand traces. Censors (hazard_hit = false) at step_cap.
TrialOutcome stopped_count_on_path(std::span<const Symbol> path, const ReturnSchedule& schedule,
                                   const TargetSpec& targets, std::int64_t step_cap,
                                   int start_index);

// Fixed-horizon count S_N on a materialized path.
std::uint64_t horizon_count_on_path(std::span<const Symbol> path, const ReturnSchedule& schedule,
                                    const TargetSpec& targets, std::int64_t horizon,
                                    int start_index);

TrialOutcome run_trial(const HazardExperimentConfig& cfg, std::uint64_t trial_index);

ExperimentReport run_experiment(const HazardExperimentConfig& cfg);

struct PoissonExperimentConfig {
    std::shared_ptr<const ProcessModel> model;
    ReturnSchedule schedule = ReturnSchedule::linear_multiples({1});
    std::vector<Symbol> target_set;
    std::int64_t horizon = 0;  // N
    std::uint64_t trials = 1;
    int start_index = 0;
    std::uint64_t seed = 0;
    BootstrapSpec bootstrap;
    int workers = 0;
    std::int64_t path_budget = 50'000'000;

    void validate() const;
    double lambda() const;  // N * Q(target)^ell
};

ExperimentReport run_poisson_experiment(const PoissonExperimentConfig& cfg);

// Shared by the gauss adapter: aggregate per-trial outcomes produced by an
// arbitrary generator into a report against Geo(rho).
ExperimentReport aggregate_geometric_report(
    const std::function<TrialOutcome(std::uint64_t)>& trial_fn, std::uint64_t trials,
    double rho, std::uint64_t seed, const BootstrapSpec& bootstrap, int workers,
    double censoring_budget, const std::string& identity);

int resolve_workers(int requested);

}  // namespace geostop
