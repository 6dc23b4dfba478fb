#include "pvass/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pvass/report.hpp"
#include "pvass/script.hpp"
#include "pvass/strategies.hpp"

namespace pvass {

namespace {

constexpr int kExitLinear = 0;
constexpr int kExitNotLinear = 1;
constexpr int kExitUnsupported = 2;
constexpr int kExitInputError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
}

StartSpec parse_start_spec(const std::string& text) {
    StartSpec spec;
    if (text.empty()) return spec;
    std::string state = text;
    std::string exprs;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        state = text.substr(0, colon);
        exprs = text.substr(colon + 1);
    }
    if (!state.empty()) spec.state = state;
    std::stringstream stream(exprs);
    std::string piece;
    while (std::getline(stream, piece, ',')) {
        spec.counters.push_back(GrowthExpr::parse(piece));
    }
    return spec;
}

std::vector<int> parse_md_file(const Model& model, const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("strategy syntax error: ") + e.what());
    }
    std::vector<int> choice(model.state_count(), -1);
    try {
        for (const auto& [state, value] : doc.at("choices").items()) {
            int s = model.state_index(state);
            auto outgoing = model.outgoing(s);
            if (value.is_number_integer()) {
                int index = value.get<int>();
                if (index < 0 || index >= static_cast<int>(outgoing.size())) {
                    throw ParseError("choice index out of range for state " + state);
                }
                choice[s] = outgoing[index];
            } else {
                int target = model.state_index(value.get<std::string>());
                for (int t : outgoing) {
                    if (model.transition(t).target == target) {
                        choice[s] = t;
                        break;
                    }
                }
                if (choice[s] < 0) {
                    throw ParseError("no transition " + state + " -> " + value.get<std::string>());
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("strategy structure error: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw ParseError(std::string("strategy references unknown state: ") + e.what());
    }
    for (int s : model.nondeterministic_states()) {
        if (choice[s] < 0) {
            throw ParseError("strategy misses a choice for state " + model.state(s).id);
        }
    }
    return choice;
}

struct SimulateArgs {
    std::string model_path;
    std::string strategy = "demonic-opt";
    std::vector<std::int64_t> n_grid;
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
    std::int64_t horizon = 0;  // 0: default 64 n^2
    std::string event;
    std::string start;
    std::string out_path;
    int jobs = 1;
};

int cmd_simulate(const SimulateArgs& args, const std::string& format, std::ostream& out,
                 std::ostream& err) {
    Model model = parse_model(read_file(args.model_path));
    StartSpec start = parse_start_spec(args.start);

    StrategyFactory factory;
    if (args.strategy == "demonic-opt") {
        factory = demonic_opt_factory(model, start);
    } else if (args.strategy == "angelic-opt") {
        factory = angelic_opt_factory(model, start);
    } else if (args.strategy == "scheme") {
        factory = scheme_factory(model, start);
    } else if (args.strategy.rfind("md:", 0) == 0) {
        factory = md_strategy_factory(model, parse_md_file(model, read_file(args.strategy.substr(3))),
                                      start);
    } else if (args.strategy.rfind("script:", 0) == 0) {
        factory = script_factory(model, parse_script(model, read_file(args.strategy.substr(7))),
                                 start);
    } else {
        throw ParseError("unknown strategy: " + args.strategy +
                         " (expected md:<file>, scheme, script:<file>, angelic-opt, demonic-opt)");
    }

    std::optional<SafetyEvent> event;
    if (!args.event.empty()) event = SafetyEvent::parse(args.event);
    HorizonFn horizon_fn = default_horizon();
    if (args.horizon > 0) {
        horizon_fn = [h = args.horizon](std::int64_t) { return h; };
    }

    SimStats stats = estimate_statistics(model, factory, args.n_grid, args.trials, horizon_fn,
                                         args.seed, event, args.jobs);
    std::string csv = stats_to_csv(stats);

    ReportJson summary;
    summary["digest"] = model_digest(model);
    summary["strategy"] = args.strategy;
    summary["seed"] = args.seed;
    summary["trials"] = args.trials;
    if (stats.rows.size() >= 3) {
        // Fit on the largest half of the grid to damp small-n transients.
        std::vector<std::pair<double, double>> points;
        for (const auto& row : stats.rows) {
            points.emplace_back(static_cast<double>(row.n), row.mean);
        }
        std::sort(points.begin(), points.end());
        std::vector<std::pair<double, double>> upper(points.begin() + points.size() / 2,
                                                     points.end());
        const auto& fit_points = upper.size() >= 3 ? upper : points;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", fit_exponent(fit_points));
        summary["fitted_exponent"] = buf;
        summary["fit_points"] = fit_points.size();
    }
    if (event) {
        summary["event"] = event->to_string();
        bool nondecreasing = true;
        for (std::size_t i = 0; i + 1 < stats.rows.size(); ++i) {
            if (*stats.rows[i + 1].event_freq < *stats.rows[i].event_freq &&
                *stats.rows[i + 1].event_ci_high < *stats.rows[i].event_ci_low) {
                nondecreasing = false;
            }
        }
        summary["event_trend_nondecreasing"] = nondecreasing;
    }

    if (args.out_path.empty()) {
        out << csv;
        err << render_report(summary, format);
    } else {
        write_file(args.out_path, csv);
        out << render_report(summary, format);
    }
    return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"termination-order analyzer and simulator for VASS MDPs"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "report rendering: text or canonical")
        ->check(CLI::IsMember({"text", "canonical"}));
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for simulation")->check(CLI::PositiveNumber);

    auto* analyze = app.add_subcommand("analyze", "decide termination order");
    std::string analyze_model, analyze_mode, emit_certificate;
    analyze->add_option("model", analyze_model, "model file")->required();
    analyze->add_option("--mode", analyze_mode, "demonic or angelic")
        ->required()
        ->check(CLI::IsMember({"demonic", "angelic"}));
    analyze->add_option("--emit-certificate", emit_certificate, "write the certificate here");

    auto* certify = app.add_subcommand("certify", "check a ranking certificate against a model");
    std::string certify_model, certify_cert;
    certify->add_option("model", certify_model, "model file")->required();
    certify->add_option("certificate", certify_cert, "certificate file")->required();

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo termination statistics");
    SimulateArgs sim;
    simulate->add_option("model", sim.model_path, "model file")->required();
    simulate->add_option("--strategy", sim.strategy,
                         "md:<file>|scheme|script:<file>|angelic-opt|demonic-opt")
        ->required();
    simulate->add_option("--n", sim.n_grid, "grid of configuration sizes")
        ->required()
        ->delimiter(',');
    simulate->add_option("--trials", sim.trials, "runs per grid point");
    simulate->add_option("--seed", sim.seed, "base seed (required: no wall-clock default)")
        ->required();
    simulate->add_option("--horizon", sim.horizon, "fixed step horizon (default 64*n^2)");
    simulate->add_option("--event", sim.event,
                         "term_at_least:<expr> or msafe_until_simlen:<expr>");
    simulate->add_option("--start", sim.start, "start spec: <state|auto>[:expr,expr,...]");
    simulate->add_option("--out", sim.out_path, "CSV output path (default: stdout)");

    auto* mec = app.add_subcommand("mec", "maximal end component decomposition");
    std::string mec_model;
    mec->add_option("model", mec_model, "model file")->required();

    auto* increments = app.add_subcommand("increments", "increments of all MD strategies");
    std::string increments_model;
    std::uint64_t cap = kDefaultStrategyCap;
    increments->add_option("model", increments_model, "model file")->required();
    increments->add_option("--cap", cap, "MD strategy enumeration cap");

    auto* scheme = app.add_subcommand("scheme", "lower-bound combination, constants and scheme");
    std::string scheme_model;
    std::int64_t scheme_n = 0;
    scheme->add_option("model", scheme_model, "model file")->required();
    scheme->add_option("--n", scheme_n, "configuration size")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        err << app.help();
        return kExitInputError;
    }

    try {
        const auto started = std::chrono::steady_clock::now();
        int code = kExitLinear;
        if (*analyze) {
            Model model = parse_model(read_file(analyze_model));
            Verdict verdict = analyze_mode == "demonic" ? decide_demonic(model)
                                                        : decide_angelic(model);
            ReportJson report = verdict_report(model, verdict);
            if (!emit_certificate.empty()) {
                for (const auto& mv : verdict.per_mec) {
                    if (verdict.structure == StructureTag::StronglyConnected && mv.certificate) {
                        write_file(emit_certificate,
                                   render_report(certificate_to_json(*mv.certificate), format));
                        report["certificate_path"] = emit_certificate;
                    }
                }
                if (verdict.structure != StructureTag::StronglyConnected &&
                    verdict.tag == VerdictTag::Linear) {
                    ReportJson bundle;
                    bundle["mecs"] = ReportJson::array();
                    auto decomp = mec_decomposition(model);
                    for (const auto& mv : verdict.per_mec) {
                        if (!mv.certificate) continue;
                        ReportJson entry = certificate_to_json(*mv.certificate);
                        ReportJson ids = ReportJson::array();
                        for (int s : decomp.mecs[mv.mec_index]) ids.push_back(model.state(s).id);
                        entry["states"] = ids;
                        bundle["mecs"].push_back(entry);
                    }
                    write_file(emit_certificate, render_report(bundle, format));
                    report["certificate_path"] = emit_certificate;
                }
            }
            out << render_report(report, format);
            switch (verdict.tag) {
                case VerdictTag::Linear: code = kExitLinear; break;
                case VerdictTag::NotLinear: code = kExitNotLinear; break;
                case VerdictTag::UnsupportedStructure: code = kExitUnsupported; break;
            }
        } else if (*certify) {
            Model model = parse_model(read_file(certify_model));
            RankingCertificate cert = certificate_from_json(read_file(certify_cert));
            auto violation = check_ranking_certificate(model, cert);
            if (violation) {
                out << "invalid: " << *violation << "\n";
                code = kExitNotLinear;
            } else {
                out << "valid\n";
                code = kExitLinear;
            }
        } else if (*simulate) {
            sim.jobs = jobs;
            code = cmd_simulate(sim, format, out, err);
        } else if (*mec) {
            Model model = parse_model(read_file(mec_model));
            out << render_report(mec_report(model), format);
        } else if (*increments) {
            Model model = parse_model(read_file(increments_model));
            out << render_report(increments_report(model, cap), format);
        } else if (*scheme) {
            Model model = parse_model(read_file(scheme_model));
            out << render_report(scheme_report(model, scheme_n), format);
        }
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);
        err << "completed in " << elapsed.count() << " ms\n";
        return code;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace pvass
