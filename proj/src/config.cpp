#include "geostop/config.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "geostop/words.hpp"

namespace geostop {

namespace {

std::string symbol_name_of(const Json& entry) {
    if (entry.is_string()) return entry.get<std::string>();
    if (entry.is_number_integer()) return std::to_string(entry.get<std::int64_t>());
    throw std::invalid_argument("symbols must be strings or integers");
}

std::vector<Symbol> parse_symbol_list(const Json& arr, const ProcessModel& model) {
    if (!arr.is_array() || arr.empty())
        throw std::invalid_argument("symbol list must be a nonempty array");
    std::vector<Symbol> out;
    out.reserve(arr.size());
    for (const auto& e : arr) out.push_back(model.symbol_id(symbol_name_of(e)));
    return out;
}

TargetSpec parse_targets(const Json& j, const ProcessModel& model) {
    if (!j.is_object()) throw std::invalid_argument("targets must be an object");
    TargetSpec t;
    if (j.contains("hazard_word") || j.contains("count_word")) {
        t.word_mode = true;
        t.hazard_word = parse_symbol_list(j.at("hazard_word"), model);
        t.count_word = parse_symbol_list(j.at("count_word"), model);
    } else {
        t.hazard_set = parse_symbol_list(j.at("hazard"), model);
        t.count_set = parse_symbol_list(j.at("count"), model);
    }
    t.validate(model.alphabet_size());
    return t;
}

BootstrapSpec parse_bootstrap(const Json& j) {
    BootstrapSpec b;
    if (j.is_null()) return b;
    if (!j.is_object()) throw std::invalid_argument("bootstrap must be an object");
    b.resamples = j.value("resamples", b.resamples);
    b.level = j.value("level", b.level);
    if (!(b.level > 0.0 && b.level < 1.0))
        throw std::invalid_argument("bootstrap level must lie in (0,1)");
    return b;
}

MixingProfile parse_psi_profile(const Json& j, const ProcessModel& model) {
    if (j.is_null()) return MixingProfile::from_model(model);
    const std::string kind = j.value("kind", std::string("model"));
    if (kind == "model") return MixingProfile::from_model(model);
    if (kind == "zero") return MixingProfile::zero();
    if (kind == "exponential")
        return MixingProfile::exponential(j.value("c", 1.0), j.at("beta").get<double>());
    if (kind == "constant") return MixingProfile::constant(j.at("value").get<double>());
    throw std::invalid_argument("psi profile kind must be model|zero|exponential|constant");
}

int upsilon_validation_len(std::size_t alphabet) {
    int len = 1;
    double combos = static_cast<double>(alphabet);
    while (len < 8 && combos * static_cast<double>(alphabet) <= 4e6) {
        combos *= static_cast<double>(alphabet);
        ++len;
    }
    return len;
}

}  // namespace

std::string version_string() { return "0.1.0"; }

std::shared_ptr<const ProcessModel> parse_model(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("model must be an object");
    const std::string variant = j.value("variant", std::string());
    if (variant == "iid") {
        std::vector<double> weights;
        std::vector<std::string> names;
        if (j.contains("uniform")) {
            const auto k = j.at("uniform").get<std::int64_t>();
            if (k < 1) throw std::invalid_argument("iid model: uniform alphabet size must be >= 1");
            weights.assign(k, 1.0 / static_cast<double>(k));
        } else if (j.at("weights").is_array()) {
            weights = j.at("weights").get<std::vector<double>>();
        } else if (j.at("weights").is_object()) {
            for (const auto& [name, w] : j.at("weights").items()) {
                names.push_back(name);
                weights.push_back(w.get<double>());
            }
        } else {
            throw std::invalid_argument("iid model: weights must be an array or an object");
        }
        return std::make_shared<const ProcessModel>(
            ProcessModel::iid(std::move(weights), std::move(names)));
    }
    if (variant == "markov") {
        auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
        std::vector<std::string> names;
        if (j.contains("states"))
            for (const auto& s : j.at("states")) names.push_back(symbol_name_of(s));
        return std::make_shared<const ProcessModel>(
            ProcessModel::markov(std::move(rows), std::move(names)));
    }
    throw std::invalid_argument("model variant must be iid or markov");
}

ReturnSchedule parse_schedule(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("schedule must be an object");
    const std::string kind = j.value("kind", std::string());
    if (kind == "linear_multiples")
        return ReturnSchedule::linear_multiples(j.at("coeffs").get<std::vector<std::int64_t>>());
    if (kind == "polynomial") {
        const auto& terms = j.at("terms");
        if (!terms.is_array()) throw std::invalid_argument("schedule: terms must be an array");
        std::size_t ell = 0;
        for (const auto& t : terms) {
            if (!t.is_array() || t.size() != 3)
                throw std::invalid_argument("schedule: each term is [i, degree, coeff]");
            const auto i = t.at(0).get<std::int64_t>();
            if (i < 1) throw std::invalid_argument("schedule: function index is 1-based");
            ell = std::max<std::size_t>(ell, static_cast<std::size_t>(i));
        }
        std::vector<std::vector<std::pair<int, std::int64_t>>> grouped(ell);
        for (const auto& t : terms)
            grouped[t.at(0).get<std::int64_t>() - 1].emplace_back(t.at(1).get<int>(),
                                                                  t.at(2).get<std::int64_t>());
        for (std::size_t i = 0; i < ell; ++i)
            if (grouped[i].empty())
                throw std::invalid_argument("schedule: function " + std::to_string(i + 1) +
                                            " has no terms");
        return ReturnSchedule::polynomial(std::move(grouped), j.value("allow_bounded_gap", false));
    }
    if (kind == "explicit_table")
        return ReturnSchedule::explicit_table(
            j.at("values").get<std::vector<std::vector<std::int64_t>>>());
    throw std::invalid_argument("schedule kind must be linear_multiples|polynomial|explicit_table");
}

std::vector<std::string> validate_config(const Json& raw, ExperimentKind kind) {
    std::vector<std::string> errors;
    std::shared_ptr<const ProcessModel> model;
    ReturnSchedule schedule = ReturnSchedule::linear_multiples({1});
    bool have_schedule = false;

    if (!raw.is_object()) return {"config must be a JSON object"};
    try {
        model = parse_model(raw.value("model", Json()));
    } catch (const std::exception& e) {
        errors.emplace_back(std::string("model: ") + e.what());
    }
    try {
        schedule = parse_schedule(raw.value("schedule", Json()));
        have_schedule = true;
    } catch (const std::exception& e) {
        errors.emplace_back(std::string("schedule: ") + e.what());
    }

    if (model) {
        if (kind == ExperimentKind::hazard) {
            try {
                (void)parse_targets(raw.value("targets", Json()), *model);
            } catch (const std::exception& e) {
                errors.emplace_back(e.what());
            }
        } else {
            try {
                const auto t = parse_symbol_list(raw.value("target", Json()), *model);
                if (model->marginal_prob(t) <= 0.0)
                    errors.emplace_back("target: set has zero stationary measure");
            } catch (const std::exception& e) {
                errors.emplace_back(std::string("target: ") + e.what());
            }
            if (raw.value("horizon", -1) < 0)
                errors.emplace_back("horizon: fixed-horizon runs need horizon >= 0");
        }
    }
    if (raw.value("trials", 1) < 1) errors.emplace_back("trials must be >= 1");
    const int start = raw.value("start_index", 0);
    if (start != 0 && start != 1) errors.emplace_back("start_index must be 0 or 1");

    // mixing threshold precheck when an explicit R is configured
    if (model && have_schedule && raw.contains("bounds") && raw.at("bounds").is_object()) {
        const auto& b = raw.at("bounds");
        try {
            const MixingProfile psi = parse_psi_profile(b.value("psi", Json()), *model);
            const auto r = b.value("R", std::int64_t{0});
            if (r >= 1) {
                const double threshold = psi_threshold_geometric(schedule.ell());
                const double at_r = psi.psi(r);
                if (!(at_r < threshold))
                    errors.emplace_back(
                        "bounds: psi(R=" + std::to_string(r) + ") = " + std::to_string(at_r) +
                        " is not below the mixing threshold 2^(1/(ell+1)) - 1 = " +
                        std::to_string(threshold));
            }
        } catch (const std::exception& e) {
            errors.emplace_back(std::string("bounds: ") + e.what());
        }
    }
    return errors;
}

ParsedExperiment parse_experiment(const Json& raw, ExperimentKind kind) {
    const auto errors = validate_config(raw, kind);
    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
    ParsedExperiment out;
    out.kind = kind;
    out.raw = raw;
    out.bounds_section = raw.value("bounds", Json());

    const auto model = parse_model(raw.at("model"));
    const auto schedule = parse_schedule(raw.at("schedule"));
    if (kind == ExperimentKind::hazard) {
        auto& c = out.hazard;
        c.model = model;
        c.schedule = schedule;
        c.targets = parse_targets(raw.at("targets"), *model);
        c.trials = raw.value("trials", std::uint64_t{10000});
        c.seed = raw.value("seed", std::uint64_t{0});
        c.step_cap = raw.value("step_cap", std::int64_t{0});
        c.start_index = raw.value("start_index", 0);
        c.censoring_budget = raw.value("censoring_budget", 1e-4);
        c.bootstrap = parse_bootstrap(raw.value("bootstrap", Json()));
        c.workers = raw.value("workers", 0);
        c.path_budget = raw.value("path_budget", std::int64_t{50'000'000});
        c.validate();
    } else {
        auto& c = out.poisson;
        c.model = model;
        c.schedule = schedule;
        c.target_set = parse_symbol_list(raw.at("target"), *model);
        c.horizon = raw.value("horizon", std::int64_t{0});
        c.trials = raw.value("trials", std::uint64_t{10000});
        c.seed = raw.value("seed", std::uint64_t{0});
        c.start_index = raw.value("start_index", 0);
        c.bootstrap = parse_bootstrap(raw.value("bootstrap", Json()));
        c.workers = raw.value("workers", 0);
        c.path_budget = raw.value("path_budget", std::int64_t{50'000'000});
        c.validate();
    }
    return out;
}

Json law_to_json(const DiscreteLaw& law) {
    Json pairs = Json::array();
    for (std::size_t k = 0; k < law.pmf.size(); ++k)
        pairs.push_back(Json::array({k, law.pmf[k]}));
    return Json{{"pmf", std::move(pairs)},
                {"tail_mass", law.tail_mass},
                {"tail_kind", tail_kind_name(law.tail_kind)}};
}

DiscreteLaw law_from_json(const Json& j) {
    DiscreteLaw law;
    std::size_t max_k = 0;
    for (const auto& pair : j.at("pmf"))
        max_k = std::max<std::size_t>(max_k, pair.at(0).get<std::size_t>());
    law.pmf.assign(j.at("pmf").empty() ? 0 : max_k + 1, 0.0);
    for (const auto& pair : j.at("pmf"))
        law.pmf[pair.at(0).get<std::size_t>()] = pair.at(1).get<double>();
    law.tail_mass = j.at("tail_mass").get<double>();
    law.tail_kind = tail_kind_from_name(j.at("tail_kind").get<std::string>());
    return law;
}

std::string config_hash(const Json& raw) {
    const std::string canonical = raw.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunManifest make_manifest(const Json& raw_config, std::uint64_t seed,
                          const std::string& subcommand) {
    RunManifest m;
    m.config_hash = config_hash(raw_config);
    m.seed = seed;
    m.tool_version = version_string();
    m.subcommand = subcommand;
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    m.created_utc = buf;
    return m;
}

Json report_to_json(const ExperimentReport& rep, const RunManifest& manifest,
                    const std::string& family, const Json& bounds) {
    Json j{{"schema_version", 1},
           {"manifest",
            {{"config_hash", manifest.config_hash},
             {"seed", manifest.seed},
             {"tool_version", manifest.tool_version},
             {"subcommand", manifest.subcommand},
             {"created_utc", manifest.created_utc},
             {"wall_time_sec", rep.wall_time_sec}}},
           {"experiment",
            {{"family", family},
             {"target_param", rep.rho_used},
             {"trials", rep.trials},
             {"censored_fraction", rep.censored_fraction},
             {"censoring_budget_exceeded", rep.censoring_budget_exceeded},
             {"empirical", law_to_json(rep.empirical)},
             {"target", law_to_json(rep.target)},
             {"tvd", {{"lo", rep.tvd_interval.lo}, {"hi", rep.tvd_interval.hi}}},
             {"bootstrap",
              {{"level", rep.bootstrap_level},
               {"lo", rep.bootstrap_ci.lo},
               {"hi", rep.bootstrap_ci.hi}}},
             {"warnings", rep.warnings}}}};
    if (!bounds.is_null()) j["bounds"] = bounds;
    return j;
}

Json bounds_report(const ParsedExperiment& parsed) {
    const Json& section = parsed.bounds_section;
    const double c_user =
        section.is_object() ? section.value("C", 1.0) : 1.0;
    const auto model = parse_model(parsed.raw.at("model"));
    const auto schedule = parse_schedule(parsed.raw.at("schedule"));
    const MixingProfile psi = parse_psi_profile(
        section.is_object() ? section.value("psi", Json()) : Json(), *model);

    Json out{{"C_user", c_user},
             {"note", "bound shape, constant not certified"}};
    if (const auto beta = psi.decay_beta_estimate()) out["psi_decay_beta_estimate"] = *beta;

    if (parsed.kind == ExperimentKind::poisson) {
        const auto& c = parsed.poisson;
        const double q = c.model->marginal_prob(c.target_set);
        std::int64_t r = section.is_object() ? section.value("R", std::int64_t{0}) : 0;
        if (r < 1) r = choose_MR(q, schedule.ell(), psi).second;
        out["family"] = "poisson";
        out["R"] = r;
        out["lambda"] = c.lambda();
        out["fixed_horizon_bound"] =
            fixed_horizon_bound(q, schedule.ell(), c.horizon, r, psi, schedule, c_user);
        return out;
    }

    const auto& c = parsed.hazard;
    if (!c.targets.word_mode) {
        const double q0 = c.model->marginal_prob(c.targets.hazard_set);
        const double q1 = c.model->marginal_prob(c.targets.count_set);
        BoundInputs b;
        b.q0 = q0;
        b.q1 = q1;
        b.ell = schedule.ell();
        b.psi = &psi;
        b.schedule = &schedule;
        b.c_user = c_user;
        std::int64_t m_cfg = section.is_object() ? section.value("M", std::int64_t{0}) : 0;
        std::int64_t r_cfg = section.is_object() ? section.value("R", std::int64_t{0}) : 0;
        if (m_cfg < 1) m_cfg = choose_M(q0, b.ell);
        if (r_cfg < 1) r_cfg = choose_MR(q0, b.ell, psi).second;
        b.M = m_cfg;
        b.R = r_cfg;
        out["family"] = "geometric";
        out["M"] = b.M;
        out["R"] = b.R;
        out["psi_at_R"] = psi.psi(b.R);
        out["psi_threshold"] = psi_threshold_geometric(b.ell);
        out["rho"] = c.target_rho();
        out["stopped_count_bound"] = stopped_count_bound(b);
        out["geo_param_gap_bound"] = 2.0 * std::pow(q1, b.ell);
        return out;
    }

    // word targets: the overlap/shift bound
    const auto& hazard_word = c.targets.hazard_word;
    const auto& count_word = c.targets.count_word;
    const double p_eta = c.model->cylinder_prob(hazard_word);
    const double p_omega = c.model->cylinder_prob(count_word);
    const auto n = static_cast<std::int64_t>(count_word.size());
    const auto m = static_cast<std::int64_t>(hazard_word.size());
    const std::int64_t kap = static_cast<std::int64_t>(kappa(count_word, hazard_word));
    const std::int64_t gamma_nm = schedule.gamma(std::max(n, m));
    const double upsilon = upsilon_rate(*c.model, upsilon_validation_len(c.model->alphabet_size()));
    const double psi_m = psi.psi(m);
    out["family"] = "geometric";
    out["kappa"] = kap;
    out["gamma"] = gamma_nm;
    out["upsilon"] = upsilon;
    out["psi_at_m"] = psi_m;
    out["psi_threshold"] = psi_threshold_shift(schedule.ell());
    out["rho"] = c.target_rho();
    out["shift_overlap_bound"] = shift_overlap_bound(p_omega, p_eta, schedule.ell(), kap, n, m, upsilon,
                                        gamma_nm, psi_m, c_user);
    return out;
}

std::string histogram_csv(const ExperimentReport& rep) {
    std::string out = "k,count,empirical_prob,target_prob\n";
    const std::size_t rows = std::max(rep.histogram.counts.size(), rep.target.pmf.size());
    const double trials = static_cast<double>(rep.trials);
    for (std::size_t k = 0; k < rows; ++k) {
        const std::uint64_t count = k < rep.histogram.counts.size() ? rep.histogram.counts[k] : 0;
        const double emp = static_cast<double>(count) / trials;
        const double tgt = k < rep.target.pmf.size() ? rep.target.pmf[k] : 0.0;
        char line[128];
        std::snprintf(line, sizeof line, "%zu,%llu,%.17g,%.17g\n", k,
                      static_cast<unsigned long long>(count), emp, tgt);
        out += line;
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
        f << contents;
        if (!f.good()) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

Json strip_volatile(Json report) {
    if (report.contains("manifest")) {
        report["manifest"].erase("created_utc");
        report["manifest"].erase("wall_time_sec");
    }
    return report;
}

}  // namespace geostop
