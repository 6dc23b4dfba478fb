#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pvass/cli.hpp"
#include "pvass/report.hpp"
#include "pvass/strategies.hpp"

namespace py = pybind11;

namespace {

pvass::Model parse(const std::string& text) { return pvass::parse_model(text); }

std::string analyze_json(const pvass::Model& model, const std::string& mode) {
    pvass::Verdict verdict;
    if (mode == "demonic") {
        verdict = pvass::decide_demonic(model);
    } else if (mode == "angelic") {
        verdict = pvass::decide_angelic(model);
    } else {
        throw std::invalid_argument("mode must be \"demonic\" or \"angelic\"");
    }
    return pvass::verdict_report(model, verdict).dump();
}

std::string simulate_json(const pvass::Model& model, const std::string& strategy,
                          const std::vector<std::int64_t>& n_grid, std::int64_t trials,
                          std::uint64_t seed, std::int64_t horizon, const std::string& event,
                          const std::string& start, int jobs) {
    pvass::StartSpec start_spec;
    if (!start.empty()) {
        std::string state = start;
        std::string exprs;
        if (auto colon = start.find(':'); colon != std::string::npos) {
            state = start.substr(0, colon);
            exprs = start.substr(colon + 1);
        }
        if (!state.empty()) start_spec.state = state;
        std::stringstream stream(exprs);
        std::string piece;
        while (std::getline(stream, piece, ',')) {
            start_spec.counters.push_back(pvass::GrowthExpr::parse(piece));
        }
    }
    pvass::StrategyFactory factory;
    if (strategy == "demonic-opt") {
        factory = pvass::demonic_opt_factory(model, start_spec);
    } else if (strategy == "angelic-opt") {
        factory = pvass::angelic_opt_factory(model, start_spec);
    } else if (strategy == "scheme") {
        factory = pvass::scheme_factory(model, start_spec);
    } else {
        throw std::invalid_argument("strategy must be demonic-opt, angelic-opt or scheme");
    }
    std::optional<pvass::SafetyEvent> event_spec;
    if (!event.empty()) event_spec = pvass::SafetyEvent::parse(event);
    pvass::HorizonFn horizon_fn = pvass::default_horizon();
    if (horizon > 0) horizon_fn = [horizon](std::int64_t) { return horizon; };
    auto stats = pvass::estimate_statistics(model, factory, n_grid, trials, horizon_fn, seed,
                                            event_spec, jobs);
    pvass::ReportJson rows = pvass::ReportJson::array();
    for (const auto& row : stats.rows) {
        pvass::ReportJson r;
        r["n"] = row.n;
        r["trials"] = row.trials;
        r["mean_term"] = row.mean;
        r["stderr"] = row.stderr_mean;
        r["q50"] = row.q50;
        r["q90"] = row.q90;
        r["q99"] = row.q99;
        r["censored"] = row.censored;
        if (row.event_freq) {
            r["event_freq"] = *row.event_freq;
            r["event_ci_low"] = *row.event_ci_low;
            r["event_ci_high"] = *row.event_ci_high;
        }
        rows.push_back(r);
    }
    pvass::ReportJson result;
    result["seed"] = seed;
    result["rows"] = rows;
    return result.dump();
}

std::tuple<int, std::string, std::string> run_cli_captured(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = pvass::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Termination-order analysis and simulation for VASS MDPs";

    py::class_<pvass::Model>(m, "Model")
        .def_property_readonly("dimension", &pvass::Model::dimension)
        .def_property_readonly("state_count", &pvass::Model::state_count)
        .def("serialize", &pvass::serialize_model)
        .def("digest", &pvass::model_digest)
        .def("state_ids", [](const pvass::Model& model) {
            std::vector<std::string> ids;
            for (const auto& s : model.states()) ids.push_back(s.id);
            return ids;
        });

    m.def("parse_model", &parse, py::arg("text"));
    m.def("validate", [](const pvass::Model& model) { return pvass::validate(model); });
    m.def("analyze_json", &analyze_json, py::arg("model"), py::arg("mode"));
    m.def("mec_json",
          [](const pvass::Model& model) { return pvass::mec_report(model).dump(); });
    m.def("increments_json",
          [](const pvass::Model& model) { return pvass::increments_report(model).dump(); });
    m.def("scheme_json", [](const pvass::Model& model, std::int64_t n) {
        return pvass::scheme_report(model, n).dump();
    });
    m.def("simulate_json", &simulate_json, py::arg("model"), py::arg("strategy"),
          py::arg("n_grid"), py::arg("trials"), py::arg("seed"), py::arg("horizon") = 0,
          py::arg("event") = "", py::arg("start") = "", py::arg("jobs") = 1);
    m.def("check_certificate_json",
          [](const pvass::Model& model, const std::string& cert_json) {
              auto cert = pvass::certificate_from_json(cert_json);
              auto violation = pvass::check_ranking_certificate(model, cert);
              return py::make_tuple(!violation.has_value(),
                                    violation ? *violation : std::string());
          });
    m.def("fit_exponent", [](const std::vector<std::pair<double, double>>& points) {
        return pvass::fit_exponent(points);
    });
    m.def("run_cli", &run_cli_captured, py::arg("args"));
}
