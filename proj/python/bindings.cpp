#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geostop/bounds.hpp"
#include "geostop/config.hpp"
#include "geostop/gauss.hpp"
#include "geostop/hazard.hpp"
#include "geostop/law.hpp"
#include "geostop/oracles.hpp"
#include "geostop/process.hpp"
#include "geostop/schedule.hpp"
#include "geostop/words.hpp"

namespace py = pybind11;
using namespace geostop;

namespace {

ReturnSchedule schedule_from_json(const std::string& text) {
    return parse_schedule(Json::parse(text));
}

std::shared_ptr<const ProcessModel> model_from_json(const std::string& text) {
    return parse_model(Json::parse(text));
}

std::string run_from_json(const std::string& text, ExperimentKind kind,
                          const std::string& subcommand) {
    const Json raw = Json::parse(text);
    const auto parsed = parse_experiment(raw, kind);
    Json bounds;
    if (!parsed.bounds_section.is_null()) bounds = bounds_report(parsed);
    const bool hazard = kind == ExperimentKind::hazard;
    const auto rep =
        hazard ? run_experiment(parsed.hazard) : run_poisson_experiment(parsed.poisson);
    const auto manifest =
        make_manifest(raw, hazard ? parsed.hazard.seed : parsed.poisson.seed, subcommand);
    return report_to_json(rep, manifest, hazard ? "geometric" : "poisson", bounds).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "stopped multiple-return simulation and limit-law checks";
    m.attr("__version__") = version_string();

    py::class_<ReturnSchedule>(m, "Schedule")
        .def_static("linear_multiples", &ReturnSchedule::linear_multiples, py::arg("coeffs"))
        .def_static("from_json", &schedule_from_json, py::arg("text"))
        .def_property_readonly("ell", &ReturnSchedule::ell)
        .def("q", &ReturnSchedule::q, py::arg("i"), py::arg("n"))
        .def(
            "gap",
            [](const ReturnSchedule& s, std::int64_t n) -> std::optional<std::int64_t> {
                return s.gap(n);
            },
            py::arg("n"), "running minimum gap; None means +infinity")
        .def("gamma", py::overload_cast<std::int64_t>(&ReturnSchedule::gamma, py::const_),
             py::arg("n"))
        .def("pair_distance", &ReturnSchedule::pair_distance, py::arg("k"), py::arg("l"));

    py::class_<DiscreteLaw>(m, "DiscreteLaw")
        .def_readonly("pmf", &DiscreteLaw::pmf)
        .def_readonly("tail_mass", &DiscreteLaw::tail_mass)
        .def_property_readonly(
            "tail_kind", [](const DiscreteLaw& l) { return tail_kind_name(l.tail_kind); })
        .def("to_json", [](const DiscreteLaw& l) { return law_to_json(l).dump(); });

    m.def("geometric_law", &geometric_law, py::arg("rho"), py::arg("support_cap"));
    m.def("poisson_law", &poisson_law, py::arg("lam"), py::arg("support_cap"),
          py::arg("allow_heavy_tail") = false);
    m.def(
        "tvd",
        [](const DiscreteLaw& a, const DiscreteLaw& b) {
            const auto t = tvd(a, b);
            return std::make_pair(t.lo, t.hi);
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "bernoulli_stopped_parameter",
        [](double p, double q) { return bernoulli_stopped_parameter({p, q}); }, py::arg("p"), py::arg("q"));
    m.def(
        "bernoulli_stopped_law",
        [](double p, double q, std::size_t cap) { return bernoulli_stopped_law({p, q}, cap); },
        py::arg("p"), py::arg("q"), py::arg("support_cap"));
    m.def("geo_param_gap_bound", &geo_param_gap_bound, py::arg("rho_small"), py::arg("rho_big"));
    m.def("poisson_param_gap_bound", &poisson_param_gap_bound, py::arg("l1"), py::arg("l2"));
    m.def("hazard_parameter", &hazard_parameter, py::arg("q0"), py::arg("q1"), py::arg("ell"));

    m.def(
        "self_period", [](const Word& w) { return self_period(w); }, py::arg("word"));
    m.def(
        "cross_period", [](const Word& a, const Word& b) { return cross_period(a, b); },
        py::arg("a"), py::arg("b"));
    m.def(
        "kappa", [](const Word& a, const Word& b) { return kappa(a, b); }, py::arg("a"),
        py::arg("b"));

    py::class_<ProcessModel, std::shared_ptr<ProcessModel>>(m, "Model")
        .def_static(
            "from_json",
            [](const std::string& text) {
                return std::const_pointer_cast<ProcessModel>(model_from_json(text));
            },
            py::arg("text"))
        .def_property_readonly("alphabet_size", &ProcessModel::alphabet_size)
        .def_property_readonly("stationary", &ProcessModel::stationary)
        .def(
            "marginal_prob",
            [](const ProcessModel& m_, const std::vector<Symbol>& subset) {
                return m_.marginal_prob(subset);
            },
            py::arg("symbols"))
        .def(
            "cylinder_prob",
            [](const ProcessModel& m_, const Word& w) { return m_.cylinder_prob(w); },
            py::arg("word"))
        .def(
            "sample_path",
            [](const ProcessModel& m_, std::size_t length, std::uint64_t seed,
               std::uint64_t stream) {
                PhiloxStream rng(seed, stream);
                return m_.sample_path(length, rng);
            },
            py::arg("length"), py::arg("seed"), py::arg("stream") = 0)
        .def(
            "psi", [](const ProcessModel& m_, std::int64_t n) { return psi_coefficient(m_, n); },
            py::arg("n"))
        .def(
            "upsilon",
            [](const ProcessModel& m_, int validation_len) {
                return upsilon_rate(m_, validation_len);
            },
            py::arg("validation_len") = 6);

    m.def("cylinder_gauss_measure", &cylinder_gauss_measure, py::arg("digits"));
    m.def("gauss_upsilon", &gauss_upsilon);
    m.def(
        "gauss_digits_of_sample",
        [](std::uint64_t seed, std::uint64_t stream, std::size_t precision_bits, std::size_t n) {
            const GaussModel model(precision_bits, std::max<std::size_t>(1, precision_bits / 4));
            PhiloxStream rng(seed, stream);
            const auto x = model.sample_point(rng);
            const auto r = digits_of(x, n);
            return std::make_pair(r.digits, static_cast<int>(r.status));
        },
        py::arg("seed"), py::arg("stream"), py::arg("precision_bits") = 256, py::arg("n") = 32);

    m.def("psi_threshold_geometric", &psi_threshold_geometric, py::arg("ell"));
    m.def("psi_threshold_shift", &psi_threshold_shift, py::arg("ell"));
    m.def("shift_overlap_bound", &shift_overlap_bound, py::arg("p_omega"), py::arg("p_eta"), py::arg("ell"),
          py::arg("kappa"), py::arg("n"), py::arg("m"), py::arg("upsilon"), py::arg("gamma"),
          py::arg("psi_m"), py::arg("c_user") = 1.0);

    m.def(
        "validate_config",
        [](const std::string& text, const std::string& kind) {
            return validate_config(Json::parse(text), kind == "poisson" ? ExperimentKind::poisson
                                                                        : ExperimentKind::hazard);
        },
        py::arg("config_json"), py::arg("kind") = "hazard");
    m.def(
        "run_hazard",
        [](const std::string& text) {
            return run_from_json(text, ExperimentKind::hazard, "simulate-hazard");
        },
        py::arg("config_json"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_poisson",
        [](const std::string& text) {
            return run_from_json(text, ExperimentKind::poisson, "simulate-poisson");
        },
        py::arg("config_json"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "evaluate_bounds",
        [](const std::string& text, const std::string& kind) {
            const auto parsed =
                parse_experiment(Json::parse(text), kind == "poisson" ? ExperimentKind::poisson
                                                                      : ExperimentKind::hazard);
            return bounds_report(parsed).dump();
        },
        py::arg("config_json"), py::arg("kind") = "hazard");
    m.def(
        "run_gauss_simulation",
        [](const Word& hazard_word, const Word& count_word, const std::vector<std::int64_t>& coeffs,
           std::uint64_t trials, std::uint64_t seed, std::size_t precision_bits,
           std::size_t max_digits) {
            GaussSimParams params;
            params.trials = trials;
            params.seed = seed;
            params.precision_bits = precision_bits;
            params.max_digits = max_digits;
            const auto schedule = ReturnSchedule::linear_multiples(coeffs);
            const auto rep = gauss_hazard_adapter(hazard_word, count_word, schedule, params);
            const Json synth{{"gauss", {{"trials", trials}, {"seed", seed}}}};
            const auto manifest = make_manifest(synth, seed, "gauss-simulate");
            return report_to_json(rep, manifest, "geometric").dump();
        },
        py::arg("hazard_word"), py::arg("count_word"), py::arg("coeffs"), py::arg("trials"),
        py::arg("seed"), py::arg("precision_bits") = 256, py::arg("max_digits") = 64,
        py::call_guard<py::gil_scoped_release>());
}
