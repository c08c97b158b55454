#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "geostop/hazard.hpp"
#include "geostop/oracles.hpp"

using namespace geostop;

namespace {

HazardExperimentConfig binary_cfg(std::uint64_t trials, std::uint64_t seed) {
    HazardExperimentConfig cfg;
    cfg.model = std::make_shared<const ProcessModel>(ProcessModel::iid({0.5, 0.5}));
    cfg.schedule = ReturnSchedule::linear_multiples({1});
    cfg.targets.hazard_set = {0};
    cfg.targets.count_set = {1};
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.bootstrap.resamples = 0;
    return cfg;
}

TargetSpec binary_sets() {
    TargetSpec t;
    t.hazard_set = {0};
    t.count_set = {1};
    return t;
}

}  // namespace

TEST_CASE("indicator: full-alphabet target is always one") {
    const Word path{0, 1, 1, 0, 1, 0};
    const auto s = ReturnSchedule::linear_multiples({1});
    TargetSpec t;
    t.hazard_set = {0};
    t.count_set = {1};
    TargetSpec full = t;
    full.count_set = {0, 1};
    full.hazard_set = {2};  // unused by the count probe
    for (std::int64_t k = 0; k < 6; ++k)
        CHECK(indicator(path, s, k, full, /*hazard=*/false) == 1);
}

TEST_CASE("indicator: hand-traced set and word probes") {
    const Word path{0, 1, 0, 1, 0, 1, 0, 1};
    const auto s = ReturnSchedule::linear_multiples({1, 2});
    TargetSpec t = binary_sets();
    // k = 1 probes positions 1 and 2: symbols 1, 0 -> product 0
    CHECK(indicator(path, s, 1, t, /*hazard=*/false) == 0);
    // k = 3 probes positions 3 and 6: symbols 1, 0 -> 0
    CHECK(indicator(path, s, 3, t, false) == 0);

    TargetSpec w;
    w.word_mode = true;
    w.count_word = {0, 1};
    w.hazard_word = {1, 1};
    CHECK(indicator(path, s, 0, w, false) == 1);  // both probes read position 0: "01" matches
    CHECK(indicator(path, s, 1, w, false) == 0);  // positions 1 and 2: "10" at 1 fails
    CHECK(indicator(path, s, 2, w, false) == 1);  // positions 2 and 4 both read "01"
}

TEST_CASE("indicator: probing past the path asks for extension") {
    const Word path{0, 1, 1};
    const auto s = ReturnSchedule::linear_multiples({1, 2});
    const TargetSpec t = binary_sets();
    // k = 2 probes positions 2 (in range, matching) and 4 (past the end)
    CHECK_THROWS_AS((void)indicator(path, s, 2, t, false), std::out_of_range);
}

TEST_CASE("stopped count on a fixed path: hazard precedence and censoring") {
    const auto s = ReturnSchedule::linear_multiples({1});
    const TargetSpec t = binary_sets();
    // hazard at the very first step: empty sum
    const auto head = stopped_count_on_path(Word{0, 1, 1}, s, t, 10, 0);
    CHECK(head.hazard_hit);
    CHECK(head.stopped_count == 0);
    CHECK(head.steps_used == 1);
    // counts accumulate until the hazard
    const auto mid = stopped_count_on_path(Word{1, 1, 0, 1}, s, t, 10, 0);
    CHECK(mid.hazard_hit);
    CHECK(mid.stopped_count == 2);
    // step cap censors instead of fabricating
    const auto cens = stopped_count_on_path(Word{1, 1, 1, 1}, s, t, 4, 0);
    CHECK_FALSE(cens.hazard_hit);
    CHECK(cens.steps_used == 4);
    // start_index = 1 skips the k = 0 probe entirely
    const auto shifted = stopped_count_on_path(Word{0, 1, 0, 1}, s, t, 10, 1);
    CHECK(shifted.hazard_hit);
    CHECK(shifted.stopped_count == 1);
    CHECK(shifted.steps_used == 2);
}

TEST_CASE("disjoint set targets never count at the hazard step") {
    const auto s = ReturnSchedule::linear_multiples({1, 2});
    const TargetSpec t = binary_sets();
    PhiloxStream rng(31, 0);
    for (int trial = 0; trial < 500; ++trial) {
        Word path(64);
        for (auto& sym : path) sym = rng.next_below(2);
        const auto out = stopped_count_on_path(path, s, t, 20, 0);
        if (!out.hazard_hit) continue;
        const std::int64_t tau = out.steps_used - 1;
        CHECK(indicator(path, s, tau, t, /*hazard=*/true) == 1);
        CHECK(indicator(path, s, tau, t, /*hazard=*/false) == 0);
        // recompute the sum independently
        std::uint64_t manual = 0;
        for (std::int64_t k = 0; k < tau; ++k) manual += indicator(path, s, k, t, false);
        CHECK(manual == out.stopped_count);
    }
}

TEST_CASE("run_trial: binary single-return chain matches Geo(1/2)") {
    const auto cfg = binary_cfg(200'000, 91);
    const auto rep = run_experiment(cfg);
    CHECK(rep.rho_used == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.tvd_interval.hi < 0.01);
    CHECK(rep.censored_fraction == 0.0);
}

TEST_CASE("run_experiment: trials=1 is a point mass; symmetric masses give rho 1/2") {
    auto cfg = binary_cfg(1, 5);
    const auto rep = run_experiment(cfg);
    CHECK(rep.trials == 1);
    CHECK(rep.tvd_interval.hi <= 1.0);

    for (const int ell : {1, 2, 3}) {
        auto c2 = binary_cfg(100, 5);
        std::vector<std::int64_t> coeffs(ell);
        for (int i = 0; i < ell; ++i) coeffs[i] = i + 1;
        c2.schedule = ReturnSchedule::linear_multiples(coeffs);
        CHECK(run_experiment(c2).rho_used == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("auto step cap follows the geometric truncation budget") {
    auto cfg = binary_cfg(10, 0);
    // hazard step probability 1/2: the raw formula gives ~20, clamped to 1000
    CHECK(cfg.resolved_step_cap() == 1000);
    cfg.step_cap = 77;
    CHECK(cfg.resolved_step_cap() == 77);
}

TEST_CASE("empirical_merge: identity, commutativity, and identity checks") {
    Histogram a, b, empty;
    a.identity = b.identity = empty.identity = "x";
    TrialOutcome o1{3, true, 4}, o2{0, true, 1}, o3{3, true, 9};
    a.record(o1);
    a.record(o2);
    b.record(o3);
    const auto ab = empirical_merge(a, b);
    const auto ba = empirical_merge(b, a);
    CHECK(ab.counts == ba.counts);
    CHECK(ab.total == 3);
    CHECK(ab.counts[3] == 2);
    const auto ae = empirical_merge(a, empty);
    CHECK(ae.counts == a.counts);
    CHECK(ae.total == a.total);
    Histogram other;
    other.identity = "y";
    CHECK_THROWS_AS((void)empirical_merge(a, other), std::invalid_argument);
}

TEST_CASE("sharding determinism: worker count never changes the histogram") {
    auto cfg = binary_cfg(20'000, 777);
    cfg.bootstrap.resamples = 100;
    cfg.workers = 1;
    const auto r1 = run_experiment(cfg);
    cfg.workers = 8;
    const auto r8 = run_experiment(cfg);
    CHECK(r1.histogram.counts == r8.histogram.counts);
    CHECK(r1.histogram.censored == r8.histogram.censored);
    CHECK(r1.tvd_interval.lo == r8.tvd_interval.lo);
    CHECK(r1.tvd_interval.hi == r8.tvd_interval.hi);
    CHECK(r1.bootstrap_ci.lo == r8.bootstrap_ci.lo);
    CHECK(r1.bootstrap_ci.hi == r8.bootstrap_ci.hi);
}

TEST_CASE("monotone horizon: a larger step cap never changes completed trials") {
    auto base = binary_cfg(500, 13);
    base.model = std::make_shared<const ProcessModel>(ProcessModel::iid({0.05, 0.95}));
    base.step_cap = 30;  // low cap: some trials censor
    auto wide = base;
    wide.step_cap = 60;
    int censored = 0;
    for (std::uint64_t t = 0; t < base.trials; ++t) {
        const auto a = run_trial(base, t);
        const auto b = run_trial(wide, t);
        if (a.hazard_hit) {
            CHECK(b.hazard_hit);
            CHECK(a.stopped_count == b.stopped_count);
            CHECK(a.steps_used == b.steps_used);
        } else {
            ++censored;
        }
    }
    CHECK(censored > 0);  // the test is vacuous unless some trials censored
}

TEST_CASE("censoring is recorded, excluded from the pmf, and flagged") {
    auto cfg = binary_cfg(2'000, 3);
    cfg.model = std::make_shared<const ProcessModel>(ProcessModel::iid({0.02, 0.98}));
    cfg.step_cap = 20;  // mean hazard time is 50: censoring is common
    const auto rep = run_experiment(cfg);
    CHECK(rep.censored_fraction > 0.1);
    CHECK(rep.censoring_budget_exceeded);
    const std::uint64_t nonc = rep.trials - rep.histogram.censored;
    double mass = 0.0;
    for (const double p : rep.empirical.pmf) mass += p;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nonc > 0);
    // the interval's upper end absorbs the censored mass
    CHECK(rep.tvd_interval.hi >= rep.censored_fraction);
}

TEST_CASE("independent-Bernoulli reference simulation matches the exact stopped law") {
    const double p = 0.3, q = 0.3;
    const std::uint64_t trials = 200'000;
    Histogram hist;
    hist.identity = "ref";
    for (std::uint64_t t = 0; t < trials; ++t) {
        PhiloxStream rng(12345, t);
        TrialOutcome out;
        for (int step = 0; step < 200; ++step) {
            const bool hazard = rng.next_double() < p;
            const bool count = rng.next_double() < q;
            if (hazard) {
                out.hazard_hit = true;
                break;
            }
            out.stopped_count += count;
        }
        hist.record(out);
    }
    DiscreteLaw empirical;
    empirical.pmf.resize(hist.counts.size());
    const double nonc = static_cast<double>(hist.total - hist.censored);
    for (std::size_t k = 0; k < hist.counts.size(); ++k)
        empirical.pmf[k] = static_cast<double>(hist.counts[k]) / nonc;
    empirical.tail_kind = TailKind::exact_zero;
    const auto exact = bernoulli_stopped_law({p, q}, std::max<std::size_t>(hist.counts.size(), 64));
    const auto t = tvd(empirical, exact);
    const double budget =
        3.0 * std::sqrt(static_cast<double>(hist.counts.size()) / static_cast<double>(trials));
    CHECK(t.hi < budget);
}

TEST_CASE("poisson: zero horizon gives the zero law exactly") {
    PoissonExperimentConfig cfg;
    cfg.model = std::make_shared<const ProcessModel>(ProcessModel::iid({0.5, 0.5}));
    cfg.schedule = ReturnSchedule::linear_multiples({1});
    cfg.target_set = {0};
    cfg.horizon = 0;
    cfg.trials = 100;
    cfg.bootstrap.resamples = 0;
    const auto rep = run_poisson_experiment(cfg);
    CHECK(rep.rho_used == 0.0);
    CHECK(rep.tvd_interval.lo == 0.0);
    CHECK(rep.tvd_interval.hi == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("poisson exact small case: N=4 binary matches the 2^4 enumeration") {
    const auto s = ReturnSchedule::linear_multiples({1});
    TargetSpec t;
    t.hazard_set = {1};  // unused
    t.count_set = {0};
    DiscreteLaw law;
    law.pmf.assign(5, 0.0);
    for (std::uint32_t bits = 0; bits < 16; ++bits) {
        Word path(4);
        for (std::size_t i = 0; i < 4; ++i) path[i] = bits >> i & 1;
        const auto count = horizon_count_on_path(path, s, t, 4, 0);
        law.pmf[count] += 1.0 / 16.0;
    }
    law.tail_kind = TailKind::exact_zero;
    const auto binomial = oracle::binomial_law(4, 0.5);
    for (std::size_t k = 0; k <= 4; ++k)
        CHECK(law.pmf[k] == doctest::Approx(binomial.pmf[k]).epsilon(1e-13));
    // TVD to Pois(2) agrees with the summation oracle
    const auto pois = poisson_law(2.0, 60);
    const auto t1 = tvd(law, pois);
    const double direct = oracle::tvd_half_l1(law, pois);
    CHECK(t1.lo == doctest::Approx(direct).epsilon(1e-12));
    CHECK(t1.hi == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("config validation rejects impossible target sets") {
    auto cfg = binary_cfg(10, 0);
    cfg.targets.hazard_set = {0, 1};
    cfg.targets.count_set = {1};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // overlap
    cfg.targets.hazard_set = {0};
    cfg.targets.count_set = {1};
    cfg.model = std::make_shared<const ProcessModel>(ProcessModel::iid({1.0, 0.0}));
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // count mass zero
}

TEST_CASE("superlinear schedules slide the path window without changing outcomes") {
    // q_i(n) = i n^2 pushes probe positions past the compaction threshold, so
    // the ring-buffer drop path runs; outcomes must match the plain replay
    auto cfg = binary_cfg(40, 21);
    cfg.model = std::make_shared<const ProcessModel>(ProcessModel::iid({0.004, 0.996}));
    cfg.schedule = ReturnSchedule::polynomial({{{2, 1}}, {{2, 2}}});
    cfg.step_cap = 600;  // max probe position 2 * 600^2 = 720000 >> 65536
    cfg.path_budget = 2'000'000;
    bool crossed_window = false;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        const auto out = run_trial(cfg, t);
        const std::int64_t k_last = cfg.start_index + out.steps_used - 1;
        if (cfg.schedule.q(2, k_last) > 200'000) crossed_window = true;
        // replay the same stream into a flat path and rerun on the span
        PhiloxStream rng(cfg.seed, t);
        const std::size_t need =
            static_cast<std::size_t>(cfg.schedule.q(2, cfg.start_index + out.steps_used)) + 2;
        const auto path = cfg.model->sample_path(need, rng);
        const auto ref = stopped_count_on_path(path, cfg.schedule, cfg.targets,
                                               cfg.step_cap, cfg.start_index);
        CHECK(out.hazard_hit == ref.hazard_hit);
        CHECK(out.stopped_count == ref.stopped_count);
        CHECK(out.steps_used == ref.steps_used);
    }
    CHECK(crossed_window);
}

TEST_CASE("explicit-table schedules run experiments within their range only") {
    std::vector<std::vector<std::int64_t>> rows(2);
    for (std::int64_t n = 0; n <= 40; ++n) {
        rows[0].push_back(n);
        rows[1].push_back(2 * n);
    }
    auto cfg = binary_cfg(400, 8);
    cfg.schedule = ReturnSchedule::explicit_table(rows);
    cfg.step_cap = 12;
    const auto rep = run_experiment(cfg);
    CHECK(rep.rho_used == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.trials == 400);

    // a cap past the table is rejected up front, never mid-run
    cfg.step_cap = 48;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("worker resolution: explicit flag beats the environment") {
    setenv("GEOSTOP_WORKERS", "3", 1);
    CHECK(resolve_workers(0) == 3);
    CHECK(resolve_workers(5) == 5);
    unsetenv("GEOSTOP_WORKERS");
    CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("word targets: hazard takes precedence when both words match") {
    // words (0) hazard and (0,0) count are compatible at the same step
    const auto s = ReturnSchedule::linear_multiples({1});
    TargetSpec t;
    t.word_mode = true;
    t.hazard_word = {0};
    t.count_word = {0, 0};
    const auto out = stopped_count_on_path(Word{1, 0, 0, 0}, s, t, 10, 0);
    CHECK(out.hazard_hit);
    CHECK(out.steps_used == 2);        // hazard at k = 1
    CHECK(out.stopped_count == 0);     // the simultaneous count match is not accumulated
}
