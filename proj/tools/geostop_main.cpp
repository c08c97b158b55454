#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "geostop/config.hpp"
#include "geostop/gauss.hpp"
#include "geostop/oracles.hpp"

namespace {

using geostop::Json;

Json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    Json j;
    f >> j;
    return j;
}

geostop::Word parse_word_arg(const std::string& text) {
    geostop::Word w;
    if (text.find(',') != std::string::npos) {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            w.push_back(static_cast<geostop::Symbol>(std::stoull(item)));
    } else {
        for (const char c : text) {
            if (c < '0' || c > '9')
                throw std::runtime_error("word symbols must be digits or a comma list");
            w.push_back(static_cast<geostop::Symbol>(c - '0'));
        }
    }
    if (w.empty()) throw std::runtime_error("empty word");
    return w;
}

void apply_overrides(Json& raw, const std::optional<std::uint64_t>& seed,
                     const std::optional<std::uint64_t>& trials, const std::optional<int>& workers) {
    if (seed) raw["seed"] = *seed;
    if (trials) raw["trials"] = *trials;
    if (workers) raw["workers"] = *workers;
}

void print_summary(const geostop::ExperimentReport& rep, const std::string& family,
                   const Json& bounds) {
    std::printf("family          : %s\n", family.c_str());
    std::printf("target param    : %.10g\n", rep.rho_used);
    std::printf("trials / seed   : %llu / %llu\n", static_cast<unsigned long long>(rep.trials),
                static_cast<unsigned long long>(rep.seed));
    std::printf("empirical TVD   : [%.6g, %.6g]\n", rep.tvd_interval.lo, rep.tvd_interval.hi);
    std::printf("bootstrap %2.0f%%   : [%.6g, %.6g]\n", rep.bootstrap_level * 100.0,
                rep.bootstrap_ci.lo, rep.bootstrap_ci.hi);
    std::printf("censored        : %.6g%%%s\n", rep.censored_fraction * 100.0,
                rep.censoring_budget_exceeded ? "  (budget exceeded)" : "");
    std::printf("wall time       : %.3g s\n", rep.wall_time_sec);
    if (!bounds.is_null()) {
        std::printf("bounds          :");
        for (const auto& [key, value] : bounds.items())
            if (value.is_number())
                std::printf(" %s=%.6g", key.c_str(), value.get<double>());
        std::printf("\n                  (%s)\n",
                    bounds.value("note", std::string("bound shape, constant not certified")).c_str());
    }
    for (const auto& w : rep.warnings) std::printf("warning         : %s\n", w.c_str());
}

int emit_outputs(const geostop::ExperimentReport& rep, const Json& report_json,
                 const std::string& out_path, const std::string& csv_path, bool strict) {
    if (!out_path.empty()) geostop::write_file_atomic(out_path, report_json.dump(2) + "\n");
    if (!csv_path.empty()) geostop::write_file_atomic(csv_path, geostop::histogram_csv(rep));
    if (strict && rep.censoring_budget_exceeded) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geostop: stopped multiple-return simulation and limit-law checks"};
    app.require_subcommand(1);

    std::string config_path, out_path, csv_path;
    std::optional<std::uint64_t> seed_flag, trials_flag;
    std::optional<int> workers_flag;
    bool strict = false;

    const auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--seed", seed_flag, "override the config seed");
        cmd->add_option("--trials", trials_flag, "override the trial count");
        cmd->add_option("--workers", workers_flag, "worker threads (0 = hardware)");
        cmd->add_option("--out", out_path, "write the report JSON here");
        cmd->add_option("--csv", csv_path, "write the histogram CSV here");
        cmd->add_flag("--strict", strict, "exit 2 when the censoring budget is violated");
    };

    auto* sim_hazard = app.add_subcommand("simulate-hazard",
                                          "law of the stopped count vs its geometric target");
    add_run_flags(sim_hazard);
    auto* sim_poisson =
        app.add_subcommand("simulate-poisson", "law of the fixed-horizon count vs Poisson");
    add_run_flags(sim_poisson);

    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate the bound formulas for a config");
    bounds_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    bounds_cmd->add_option("--out", out_path, "write the bounds JSON here");
    bool bounds_poisson = false;
    bounds_cmd->add_flag("--poisson", bounds_poisson, "treat the config as a fixed-horizon run");

    auto* word_stats = app.add_subcommand("word-stats", "periods and overlap scale of two words");
    std::string word_a, word_b;
    word_stats->add_option("--a", word_a, "first word (digits or comma list)")->required();
    word_stats->add_option("--b", word_b, "second word")->required();

    auto* gauss_cmd = app.add_subcommand("gauss", "continued-fraction digit process");
    gauss_cmd->require_subcommand(1);
    auto* gauss_measure = gauss_cmd->add_subcommand("measure", "Gauss measure of a digit cylinder");
    std::string digits_arg;
    gauss_measure->add_option("--digits", digits_arg, "comma-separated digits")->required();
    auto* gauss_sim = gauss_cmd->add_subcommand("simulate", "hazard run over digit sequences");
    std::string gauss_a, gauss_b, coeffs_arg;
    std::uint64_t gauss_trials = 10000, gauss_seed = 0;
    int gauss_ell = 1, gauss_workers = 0;
    std::size_t precision_bits = 512, max_digits = 200;
    gauss_sim->add_option("--a", gauss_a, "hazard word digits")->required();
    gauss_sim->add_option("--b", gauss_b, "count word digits")->required();
    gauss_sim->add_option("--ell", gauss_ell, "use q_i(n) = i*n with this many probes");
    gauss_sim->add_option("--coeffs", coeffs_arg, "linear schedule coefficients (comma list)");
    gauss_sim->add_option("--trials", gauss_trials, "trial count");
    gauss_sim->add_option("--seed", gauss_seed, "stream seed");
    gauss_sim->add_option("--workers", gauss_workers, "worker threads");
    gauss_sim->add_option("--precision-bits", precision_bits, "dyadic precision of start points");
    gauss_sim->add_option("--max-digits", max_digits, "digit budget per trial");
    gauss_sim->add_option("--out", out_path, "write the report JSON here");
    gauss_sim->add_option("--csv", csv_path, "write the histogram CSV here");

    auto* oracle_cmd = app.add_subcommand("oracle", "run the brute-force cross-check suites");
    bool oracle_quick = false;
    oracle_cmd->add_flag("--quick", oracle_quick, "smaller random samples");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim_hazard->parsed() || sim_poisson->parsed()) {
            const auto kind = sim_hazard->parsed() ? geostop::ExperimentKind::hazard
                                                   : geostop::ExperimentKind::poisson;
            Json raw = load_config(config_path);
            apply_overrides(raw, seed_flag, trials_flag, workers_flag);
            const auto errors = geostop::validate_config(raw, kind);
            if (!errors.empty()) {
                std::fprintf(stderr, "config errors:\n");
                for (const auto& e : errors) std::fprintf(stderr, "  - %s\n", e.c_str());
                return 1;
            }
            const auto parsed = geostop::parse_experiment(raw, kind);
            Json bounds;
            if (!parsed.bounds_section.is_null()) bounds = geostop::bounds_report(parsed);
            const bool hazard = kind == geostop::ExperimentKind::hazard;
            const auto rep = hazard ? geostop::run_experiment(parsed.hazard)
                                    : geostop::run_poisson_experiment(parsed.poisson);
            const std::string family = hazard ? "geometric" : "poisson";
            const auto manifest = geostop::make_manifest(
                raw, hazard ? parsed.hazard.seed : parsed.poisson.seed,
                hazard ? "simulate-hazard" : "simulate-poisson");
            const Json report_json = geostop::report_to_json(rep, manifest, family, bounds);
            print_summary(rep, family, bounds);
            return emit_outputs(rep, report_json, out_path, csv_path, strict);
        }

        if (bounds_cmd->parsed()) {
            const auto kind = bounds_poisson ? geostop::ExperimentKind::poisson
                                             : geostop::ExperimentKind::hazard;
            const Json raw = load_config(config_path);
            const auto parsed = geostop::parse_experiment(raw, kind);
            const Json bounds = geostop::bounds_report(parsed);
            const std::string text = bounds.dump(2) + "\n";
            std::fputs(text.c_str(), stdout);
            if (!out_path.empty()) geostop::write_file_atomic(out_path, text);
            return 0;
        }

        if (word_stats->parsed()) {
            const auto a = parse_word_arg(word_a);
            const auto b = parse_word_arg(word_b);
            const Json j{{"pi_a", geostop::self_period(a)},
                         {"pi_b", geostop::self_period(b)},
                         {"pi_ab", geostop::cross_period(a, b)},
                         {"kappa", geostop::kappa(a, b)}};
            std::fputs((j.dump() + "\n").c_str(), stdout);
            return 0;
        }

        if (gauss_measure->parsed()) {
            const auto digits = parse_word_arg(digits_arg);
            const double g = geostop::cylinder_gauss_measure(digits);
            const Json j{{"digits", digits}, {"measure", g}};
            std::fputs((j.dump() + "\n").c_str(), stdout);
            return 0;
        }

        if (gauss_sim->parsed()) {
            geostop::ReturnSchedule schedule = geostop::ReturnSchedule::linear_multiples({1});
            if (!coeffs_arg.empty()) {
                std::vector<std::int64_t> coeffs;
                std::stringstream ss(coeffs_arg);
                std::string item;
                while (std::getline(ss, item, ',')) coeffs.push_back(std::stoll(item));
                schedule = geostop::ReturnSchedule::linear_multiples(coeffs);
            } else if (gauss_ell > 1) {
                std::vector<std::int64_t> coeffs(gauss_ell);
                for (int i = 0; i < gauss_ell; ++i) coeffs[i] = i + 1;
                schedule = geostop::ReturnSchedule::linear_multiples(coeffs);
            }
            geostop::GaussSimParams params;
            params.trials = gauss_trials;
            params.seed = gauss_seed;
            params.precision_bits = precision_bits;
            params.max_digits = max_digits;
            params.workers = gauss_workers;
            const auto hazard_word = parse_word_arg(gauss_a);
            const auto count_word = parse_word_arg(gauss_b);
            const auto rep =
                geostop::gauss_hazard_adapter(hazard_word, count_word, schedule, params);
            const Json synth{{"gauss", {{"a", hazard_word},
                                        {"b", count_word},
                                        {"trials", gauss_trials},
                                        {"seed", gauss_seed},
                                        {"precision_bits", precision_bits},
                                        {"max_digits", max_digits}}}};
            const auto manifest = geostop::make_manifest(synth, gauss_seed, "gauss-simulate");
            const Json report_json = geostop::report_to_json(rep, manifest, "geometric");
            print_summary(rep, "geometric", Json());
            return emit_outputs(rep, report_json, out_path, csv_path, strict);
        }

        if (oracle_cmd->parsed()) {
            const int failures = geostop::oracle::run_suite(std::cout, oracle_quick);
            return failures == 0 ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
