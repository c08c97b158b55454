#include "geostop/hazard.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <type_traits>

namespace geostop {

namespace {

// Membership/word matcher shared by the public indicator op and the engine.
struct TargetMatcher {
    bool word_mode = false;
    std::vector<char> hazard_member, count_member;
    Word hazard_word, count_word;

    explicit TargetMatcher(const TargetSpec& t, std::size_t alphabet) : word_mode(t.word_mode) {
        if (word_mode) {
            hazard_word = t.hazard_word;
            count_word = t.count_word;
        } else {
            hazard_member.assign(alphabet, 0);
            count_member.assign(alphabet, 0);
            for (const Symbol s : t.hazard_set) hazard_member.at(s) = 1;
            for (const Symbol s : t.count_set) count_member.at(s) = 1;
        }
    }

    template <class Path>
    bool word_at(const Path& path, std::int64_t pos, const Word& w) const {
        for (std::size_t j = 0; j < w.size(); ++j)
            if (path[pos + static_cast<std::int64_t>(j)] != w[j]) return false;
        return true;
    }

    template <class Path>
    int probe(const Path& path, const ReturnSchedule& schedule, std::int64_t k,
              bool hazard) const {
        const int ell = schedule.ell();
        for (int i = 1; i <= ell; ++i) {
            const std::int64_t pos = schedule.q(i, k);
            if (word_mode) {
                if (!word_at(path, pos, hazard ? hazard_word : count_word)) return 0;
            } else {
                const Symbol s = path[pos];
                const char ok = hazard ? hazard_member[s] : count_member[s];
                if (!ok) return 0;
            }
        }
        return 1;
    }
};

struct SpanPath {
    std::span<const Symbol> data;
    Symbol operator[](std::int64_t pos) const {
        if (pos < 0 || static_cast<std::size_t>(pos) >= data.size())
            throw std::out_of_range("indicator: probe at position " + std::to_string(pos) +
                                    " beyond the provided path (length " +
                                    std::to_string(data.size()) + "); extend the path");
        return data[static_cast<std::size_t>(pos)];
    }
};

// Lazily generated sample path with a sliding window: positions below the
// current q_1(k) are dropped, so memory stays proportional to the probe
// window even for superlinear schedules.
class ModelPath {
public:
    ModelPath(const ProcessModel& model, PhiloxStream rng, std::int64_t budget)
        : model_(model), rng_(rng), budget_(budget) {}

    bool ensure(std::int64_t upto) {  // exclusive end position
        if (upto > budget_) return false;
        while (next_pos_ < upto) {
            const Symbol s = started_ ? model_.sample_next(last_, rng_)
                                      : model_.sample_initial(rng_);
            started_ = true;
            last_ = s;
            buf_.push_back(s);
            ++next_pos_;
        }
        return true;
    }

    void drop_before(std::int64_t pos) {
        if (pos <= base_) return;
        const std::int64_t lag = pos - base_;
        if (lag < 65536) return;  // compact in chunks
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(lag));
        base_ = pos;
    }

    Symbol operator[](std::int64_t pos) const { return buf_[static_cast<std::size_t>(pos - base_)]; }

private:
    const ProcessModel& model_;
    PhiloxStream rng_;
    std::int64_t budget_;
    std::vector<Symbol> buf_;
    std::int64_t base_ = 0;
    std::int64_t next_pos_ = 0;
    bool started_ = false;
    Symbol last_ = 0;
};

void first_error_parallel_for(std::uint64_t n, int workers,
                              const std::function<void(std::uint64_t, std::uint64_t, int)>& fn) {
    if (workers <= 1 || n <= 1) {
        fn(0, n, 0);
        return;
    }
    const auto w = static_cast<std::uint64_t>(workers);
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    const std::uint64_t chunk = (n + w - 1) / w;
    for (std::uint64_t i = 0; i < w; ++i) {
        const std::uint64_t lo = i * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi, i] {
            try {
                fn(lo, hi, static_cast<int>(i));
            } catch (...) {
                const std::lock_guard<std::mutex> g(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

template <class Path>
TrialOutcome scan_until_hazard(Path& path, const ReturnSchedule& schedule,
                               const TargetMatcher& matcher, std::size_t window,
                               std::int64_t step_cap, int start_index) {
    TrialOutcome out;
    const int ell = schedule.ell();
    for (std::int64_t step = 0; step < step_cap; ++step) {
        const std::int64_t k = start_index + step;
        if constexpr (std::is_same_v<Path, ModelPath>) {
            const std::int64_t end = schedule.q(ell, k) + static_cast<std::int64_t>(window) + 1;
            if (!path.ensure(end)) {  // budget exhausted: censored, never fabricated
                out.steps_used = step;
                return out;
            }
            path.drop_before(schedule.q(1, k));
        }
        out.steps_used = step + 1;
        if (matcher.probe(path, schedule, k, /*hazard=*/true)) {
            out.hazard_hit = true;  // the count at the hazard step is not accumulated
            return out;
        }
        out.stopped_count += matcher.probe(path, schedule, k, /*hazard=*/false);
    }
    return out;  // censored at step_cap
}

DiscreteLaw empirical_law(const Histogram& hist) {
    const std::uint64_t nonc = hist.total - hist.censored;
    if (nonc == 0) throw std::runtime_error("experiment: every trial was censored");
    DiscreteLaw law;
    law.pmf.resize(hist.counts.size());
    for (std::size_t k = 0; k < hist.counts.size(); ++k)
        law.pmf[k] = static_cast<double>(hist.counts[k]) / static_cast<double>(nonc);
    law.tail_mass = 0.0;
    law.tail_kind = TailKind::exact_zero;
    return law;
}

std::vector<std::uint64_t> cumulative(const std::vector<std::uint64_t>& counts) {
    std::vector<std::uint64_t> cum(counts.size());
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        acc += counts[i];
        cum[i] = acc;
    }
    return cum;
}

TvdInterval bootstrap_ci(const Histogram& hist, const DiscreteLaw& target,
                         const BootstrapSpec& spec, std::uint64_t seed, int workers) {
    const std::uint64_t nonc = hist.total - hist.censored;
    const std::uint32_t b_count = spec.resamples;
    if (b_count == 0 || nonc == 0) return {0.0, 0.0};
    const auto cum = cumulative(hist.counts);
    std::vector<double> stats(b_count, 0.0);
    first_error_parallel_for(b_count, workers, [&](std::uint64_t lo, std::uint64_t hi, int) {
        for (std::uint64_t b = lo; b < hi; ++b) {
            PhiloxStream rng(seed, (std::uint64_t{1} << 63) | b);
            std::vector<std::uint64_t> resampled(hist.counts.size(), 0);
            for (std::uint64_t i = 0; i < nonc; ++i) {
                const std::uint64_t r = rng.next_below(nonc);
                const auto it = std::upper_bound(cum.begin(), cum.end(), r);
                ++resampled[static_cast<std::size_t>(it - cum.begin())];
            }
            DiscreteLaw law;
            law.pmf.resize(resampled.size());
            for (std::size_t k = 0; k < resampled.size(); ++k)
                law.pmf[k] = static_cast<double>(resampled[k]) / static_cast<double>(nonc);
            law.tail_kind = TailKind::exact_zero;
            const TvdInterval t = tvd(law, target);
            stats[b] = 0.5 * (t.lo + t.hi);
        }
    });
    std::sort(stats.begin(), stats.end());
    const double alpha = (1.0 - spec.level) / 2.0;
    const auto lo_idx = static_cast<std::size_t>(std::floor(alpha * (b_count - 1)));
    const auto hi_idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * (b_count - 1)));
    return {stats[lo_idx], stats[hi_idx]};
}

ExperimentReport finish_report(Histogram hist, const DiscreteLaw& target, double param,
                               std::uint64_t seed, const BootstrapSpec& bootstrap,
                               double censoring_budget, int workers) {
    ExperimentReport rep;
    rep.empirical = empirical_law(hist);
    rep.target = target;
    rep.rho_used = param;
    rep.trials = hist.total;
    rep.seed = seed;
    rep.censored_fraction =
        static_cast<double>(hist.censored) / static_cast<double>(hist.total);
    rep.tvd_interval = tvd(rep.empirical, rep.target);
    // censored trials could have landed anywhere: absorb them into the
    // interval's upper end instead of inventing outcomes
    rep.tvd_interval.hi = std::min(1.0, rep.tvd_interval.hi + rep.censored_fraction);
    rep.bootstrap_level = bootstrap.level;
    rep.bootstrap_ci = bootstrap_ci(hist, rep.target, bootstrap, seed, workers);
    if (rep.censored_fraction > censoring_budget) {
        rep.censoring_budget_exceeded = true;
        rep.warnings.push_back("censored fraction " + std::to_string(rep.censored_fraction) +
                               " exceeds budget " + std::to_string(censoring_budget));
    }
    rep.histogram = std::move(hist);
    return rep;
}

std::size_t geometric_support_cap(double rho, std::size_t at_least) {
    if (rho >= 1.0) return at_least + 1;
    const double k = std::log(1e-13) / std::log1p(-rho);
    return std::max<std::size_t>(at_least + 1, static_cast<std::size_t>(k) + 2);
}

std::size_t poisson_support_cap(double lambda, std::size_t at_least) {
    const double guess = lambda + 12.0 * std::sqrt(lambda + 1.0) + 30.0;
    return std::max<std::size_t>(at_least + 1, static_cast<std::size_t>(guess));
}

}  // namespace

void TargetSpec::validate(std::size_t alphabet_size) const {
    if (word_mode) {
        if (hazard_word.empty() || count_word.empty())
            throw std::invalid_argument("targets: words must be nonempty");
        if (hazard_word == count_word)
            throw std::invalid_argument("targets: hazard and count words must differ");
        for (const Symbol s : hazard_word)
            if (s >= alphabet_size) throw std::invalid_argument("targets: unknown symbol in hazard word");
        for (const Symbol s : count_word)
            if (s >= alphabet_size) throw std::invalid_argument("targets: unknown symbol in count word");
    } else {
        if (hazard_set.empty() || count_set.empty())
            throw std::invalid_argument("targets: sets must be nonempty");
        std::vector<char> in_hazard(alphabet_size, 0);
        for (const Symbol s : hazard_set) {
            if (s >= alphabet_size) throw std::invalid_argument("targets: unknown symbol in hazard set");
            in_hazard[s] = 1;
        }
        for (const Symbol s : count_set) {
            if (s >= alphabet_size) throw std::invalid_argument("targets: unknown symbol in count set");
            if (in_hazard[s])
                throw std::invalid_argument(
                    "targets: hazard and count sets overlap; they must be disjoint");
        }
    }
}

std::size_t TargetSpec::probe_window() const {
    if (!word_mode) return 0;
    return std::max(hazard_word.size(), count_word.size()) - 1;
}

void HazardExperimentConfig::validate() const {
    if (!model) throw std::invalid_argument("config: missing model");
    targets.validate(model->alphabet_size());
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (start_index != 0 && start_index != 1)
        throw std::invalid_argument("config: start_index must be 0 or 1");
    if (!targets.word_mode) {
        if (model->marginal_prob(targets.hazard_set) <= 0.0)
            throw std::invalid_argument("config: hazard set has zero stationary measure");
        if (model->marginal_prob(targets.count_set) <= 0.0)
            throw std::invalid_argument("config: count set has zero stationary measure");
    } else {
        if (model->cylinder_prob(targets.hazard_word) <= 0.0)
            throw std::invalid_argument("config: hazard word has zero cylinder measure");
        if (model->cylinder_prob(targets.count_word) <= 0.0)
            throw std::invalid_argument("config: count word has zero cylinder measure");
    }
    if (schedule.kind() == ScheduleKind::explicit_table &&
        start_index + resolved_step_cap() > schedule.max_index())
        throw std::invalid_argument("config: explicit table too short for the step cap");
}

double HazardExperimentConfig::hazard_step_prob() const {
    const int ell = schedule.ell();
    const double base = targets.word_mode ? model->cylinder_prob(targets.hazard_word)
                                          : model->marginal_prob(targets.hazard_set);
    return std::pow(base, ell);
}

std::int64_t HazardExperimentConfig::resolved_step_cap() const {
    if (step_cap > 0) return step_cap;
    const double p = hazard_step_prob();
    if (p >= 1.0) return 1000;
    const double m = std::ceil(std::log(1e-6) / std::log1p(-p));
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(m), 1000, 100'000'000);
}

double HazardExperimentConfig::target_rho() const {
    const int ell = schedule.ell();
    if (targets.word_mode)
        return hazard_parameter(model->cylinder_prob(targets.hazard_word),
                                model->cylinder_prob(targets.count_word), ell);
    return hazard_parameter(model->marginal_prob(targets.hazard_set),
                            model->marginal_prob(targets.count_set), ell);
}

void Histogram::record(const TrialOutcome& out) {
    ++total;
    if (!out.hazard_hit) {
        ++censored;  // censored outcomes never enter the pmf
        return;
    }
    if (counts.size() <= out.stopped_count) counts.resize(out.stopped_count + 1, 0);
    ++counts[out.stopped_count];
}

Histogram empirical_merge(const Histogram& a, const Histogram& b) {
    if (a.identity != b.identity)
        throw std::invalid_argument("empirical_merge: mismatched experiment identities ('" +
                                    a.identity + "' vs '" + b.identity + "')");
    Histogram out = a;
    out.counts.resize(std::max(a.counts.size(), b.counts.size()), 0);
    for (std::size_t k = 0; k < b.counts.size(); ++k) out.counts[k] += b.counts[k];
    out.censored += b.censored;
    out.total += b.total;
    return out;
}

namespace {

std::size_t alphabet_for(std::span<const Symbol> path, const TargetSpec& targets) {
    std::size_t alphabet = 1;
    for (const Symbol s : path) alphabet = std::max<std::size_t>(alphabet, s + 1);
    for (const Symbol s : targets.hazard_set) alphabet = std::max<std::size_t>(alphabet, s + 1);
    for (const Symbol s : targets.count_set) alphabet = std::max<std::size_t>(alphabet, s + 1);
    return alphabet;
}

}  // namespace

int indicator(std::span<const Symbol> path, const ReturnSchedule& schedule, std::int64_t k,
              const TargetSpec& targets, bool hazard) {
    const TargetMatcher matcher(targets, alphabet_for(path, targets));
    const SpanPath sp{path};
    return matcher.probe(sp, schedule, k, hazard);
}

TrialOutcome stopped_count_on_path(std::span<const Symbol> path, const ReturnSchedule& schedule,
                                   const TargetSpec& targets, std::int64_t step_cap,
                                   int start_index) {
    const TargetMatcher matcher(targets, alphabet_for(path, targets));
    SpanPath sp{path};
    return scan_until_hazard(sp, schedule, matcher, targets.probe_window(), step_cap,
                             start_index);
}

std::uint64_t horizon_count_on_path(std::span<const Symbol> path, const ReturnSchedule& schedule,
                                    const TargetSpec& targets, std::int64_t horizon,
                                    int start_index) {
    const TargetMatcher matcher(targets, alphabet_for(path, targets));
    const SpanPath sp{path};
    std::uint64_t total = 0;
    for (std::int64_t k = start_index; k < start_index + horizon; ++k)
        total += matcher.probe(sp, schedule, k, /*hazard=*/false);
    return total;
}

TrialOutcome run_trial(const HazardExperimentConfig& cfg, std::uint64_t trial_index) {
    const TargetMatcher matcher(cfg.targets, cfg.model->alphabet_size());
    ModelPath path(*cfg.model, PhiloxStream(cfg.seed, trial_index), cfg.path_budget);
    return scan_until_hazard(path, cfg.schedule, matcher, cfg.targets.probe_window(),
                             cfg.resolved_step_cap(), cfg.start_index);
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GEOSTOP_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

ExperimentReport run_experiment(const HazardExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const int workers = resolve_workers(cfg.workers);
    const std::string identity =
        "hazard seed=" + std::to_string(cfg.seed) + " trials=" + std::to_string(cfg.trials) +
        " cap=" + std::to_string(cfg.resolved_step_cap()) +
        " start=" + std::to_string(cfg.start_index);

    std::vector<Histogram> shards(static_cast<std::size_t>(workers));
    for (auto& s : shards) s.identity = identity;
    first_error_parallel_for(cfg.trials, workers,
                             [&](std::uint64_t lo, std::uint64_t hi, int widx) {
                                 for (std::uint64_t t = lo; t < hi; ++t)
                                     shards[static_cast<std::size_t>(widx)].record(
                                         run_trial(cfg, t));
                             });
    Histogram hist = shards[0];
    for (std::size_t i = 1; i < shards.size(); ++i) hist = empirical_merge(hist, shards[i]);

    const double rho = cfg.target_rho();
    const DiscreteLaw target =
        geometric_law(rho, geometric_support_cap(rho, hist.counts.size()));
    ExperimentReport rep = finish_report(std::move(hist), target, rho, cfg.seed, cfg.bootstrap,
                                         cfg.censoring_budget, workers);
    rep.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void PoissonExperimentConfig::validate() const {
    if (!model) throw std::invalid_argument("config: missing model");
    if (horizon < 0) throw std::invalid_argument("config: horizon must be >= 0");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (start_index != 0 && start_index != 1)
        throw std::invalid_argument("config: start_index must be 0 or 1");
    if (target_set.empty()) throw std::invalid_argument("config: target set must be nonempty");
    if (model->marginal_prob(target_set) <= 0.0)
        throw std::invalid_argument("config: target set has zero stationary measure");
    if (schedule.kind() == ScheduleKind::explicit_table &&
        start_index + horizon > schedule.max_index() + 1)
        throw std::invalid_argument("config: explicit table too short for the horizon");
}

double PoissonExperimentConfig::lambda() const {
    return static_cast<double>(horizon) *
           std::pow(model->marginal_prob(target_set), schedule.ell());
}

ExperimentReport run_poisson_experiment(const PoissonExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const int workers = resolve_workers(cfg.workers);
    const std::string identity =
        "poisson seed=" + std::to_string(cfg.seed) + " trials=" + std::to_string(cfg.trials) +
        " N=" + std::to_string(cfg.horizon) + " start=" + std::to_string(cfg.start_index);

    TargetSpec counting;
    counting.word_mode = false;
    counting.count_set = cfg.target_set;
    counting.hazard_set = cfg.target_set;  // unused by the horizon scan
    const TargetMatcher matcher(counting, cfg.model->alphabet_size());
    const int ell = cfg.schedule.ell();

    std::vector<Histogram> shards(static_cast<std::size_t>(workers));
    for (auto& s : shards) s.identity = identity;
    first_error_parallel_for(cfg.trials, workers, [&](std::uint64_t lo, std::uint64_t hi,
                                                      int widx) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            ModelPath path(*cfg.model, PhiloxStream(cfg.seed, t), cfg.path_budget);
            std::uint64_t total = 0;
            for (std::int64_t k = cfg.start_index; k < cfg.start_index + cfg.horizon; ++k) {
                const std::int64_t end = cfg.schedule.q(ell, k) + 1;
                if (!path.ensure(end))
                    throw std::runtime_error("poisson experiment: path budget exhausted");
                path.drop_before(cfg.schedule.q(1, k));
                total += matcher.probe(path, cfg.schedule, k, /*hazard=*/false);
            }
            TrialOutcome out;
            out.stopped_count = total;
            out.hazard_hit = true;  // horizon runs never censor
            out.steps_used = cfg.horizon;
            shards[static_cast<std::size_t>(widx)].record(out);
        }
    });
    Histogram hist = shards[0];
    for (std::size_t i = 1; i < shards.size(); ++i) hist = empirical_merge(hist, shards[i]);

    const double lam = cfg.lambda();
    const DiscreteLaw target =
        poisson_law(lam, poisson_support_cap(lam, hist.counts.size()));
    ExperimentReport rep = finish_report(std::move(hist), target, lam, cfg.seed, cfg.bootstrap,
                                         1.0, workers);
    rep.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ExperimentReport aggregate_geometric_report(
    const std::function<TrialOutcome(std::uint64_t)>& trial_fn, std::uint64_t trials, double rho,
    std::uint64_t seed, const BootstrapSpec& bootstrap, int workers, double censoring_budget,
    const std::string& identity) {
    const auto t0 = std::chrono::steady_clock::now();
    const int w = resolve_workers(workers);
    std::vector<Histogram> shards(static_cast<std::size_t>(w));
    for (auto& s : shards) s.identity = identity;
    first_error_parallel_for(trials, w, [&](std::uint64_t lo, std::uint64_t hi, int widx) {
        for (std::uint64_t t = lo; t < hi; ++t)
            shards[static_cast<std::size_t>(widx)].record(trial_fn(t));
    });
    Histogram hist = shards[0];
    for (std::size_t i = 1; i < shards.size(); ++i) hist = empirical_merge(hist, shards[i]);

    const DiscreteLaw target = geometric_law(rho, geometric_support_cap(rho, hist.counts.size()));
    ExperimentReport rep =
        finish_report(std::move(hist), target, rho, seed, bootstrap, censoring_budget, w);
    rep.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace geostop
