#include "pvass/report.hpp"

#include <cinttypes>
#include <cstdio>

namespace pvass {

namespace {

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
    return buf;
}

ReportJson rational_vector(const std::vector<Rational>& values) {
    ReportJson array = ReportJson::array();
    for (const auto& v : values) array.push_back(rational_to_string(v));
    return array;
}

ReportJson state_ids(const Model& model, const std::vector<int>& states) {
    ReportJson array = ReportJson::array();
    for (int s : states) array.push_back(model.state(s).id);
    return array;
}

ReportJson strategy_json(const Model& model, const MdStrategy& strategy) {
    ReportJson obj = ReportJson::object();
    for (int s = 0; s < model.state_count(); ++s) {
        if (strategy.choice[s] < 0) continue;
        obj[model.state(s).id] = model.state(model.transition(strategy.choice[s]).target).id;
    }
    return obj;
}

ReportJson combination_json(const Model& model, const NonnegCombination& combo) {
    ReportJson items = ReportJson::array();
    for (const auto& item : combo.items) {
        ReportJson j;
        j["increment"] = rational_vector(item.increment.value);
        j["strategy"] = strategy_json(model, item.increment.strategy);
        j["bscc"] = state_ids(model, item.increment.bscc);
        j["coefficient"] = item.coefficient;
        items.push_back(j);
    }
    ReportJson result;
    result["items"] = items;
    result["sum"] = rational_vector(combo.weighted_sum(model.dimension()));
    return result;
}

}  // namespace

std::string model_digest(const Model& model) { return fnv1a_hex(serialize_model(model)); }

ReportJson certificate_to_json(const RankingCertificate& cert) {
    ReportJson j;
    j["w"] = rational_vector(cert.w);
    ReportJson z = ReportJson::object();
    for (const auto& [state, value] : cert.z) z[state] = rational_to_string(value);
    j["z"] = z;
    j["slack"] = rational_to_string(cert.slack);
    return j;
}

RankingCertificate certificate_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("certificate syntax error: ") + e.what());
    }
    RankingCertificate cert;
    try {
        for (const auto& w : doc.at("w")) cert.w.push_back(parse_rational(w.get<std::string>()));
        for (const auto& [state, value] : doc.at("z").items()) {
            cert.z[state] = parse_rational(value.get<std::string>());
        }
        cert.slack = parse_rational(doc.at("slack").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("certificate structure error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("certificate value error: ") + e.what());
    }
    return cert;
}

ReportJson verdict_report(const Model& model, const Verdict& verdict) {
    ReportJson report;
    report["digest"] = model_digest(model);
    report["mode"] = verdict.mode == AnalysisMode::Demonic ? "demonic" : "angelic";
    report["verdict"] = verdict_tag_name(verdict.tag);
    report["structure"] = structure_tag_name(verdict.structure);
    if (!verdict.cycle_witness.empty()) {
        ReportJson cycle = ReportJson::array();
        for (const auto& mec : verdict.cycle_witness) {
            ReportJson ids = ReportJson::array();
            for (const auto& id : mec) ids.push_back(id);
            cycle.push_back(ids);
        }
        report["cycle"] = cycle;
    }
    auto decomp = mec_decomposition(model);
    ReportJson per_mec = ReportJson::array();
    for (const auto& mv : verdict.per_mec) {
        ReportJson entry;
        entry["mec"] = state_ids(model, decomp.mecs[mv.mec_index]);
        entry["verdict"] = verdict_tag_name(mv.tag);
        if (mv.certificate) entry["certificate"] = certificate_to_json(*mv.certificate);
        if (mv.combination) entry["combination"] = combination_json(model, *mv.combination);
        if (!mv.projections.empty()) {
            ReportJson projections = ReportJson::array();
            for (const auto& p : mv.projections) {
                ReportJson pj;
                pj["counter"] = p.counter + 1;
                pj["min_mean_payoff"] = rational_to_string(p.value);
                projections.push_back(pj);
            }
            entry["projections"] = projections;
            if (mv.linear_counter) entry["linear_counter"] = *mv.linear_counter + 1;
        }
        per_mec.push_back(entry);
    }
    report["per_mec"] = per_mec;
    return report;
}

ReportJson mec_report(const Model& model) {
    auto decomp = mec_decomposition(model);
    auto structure = classify_structure(model, decomp);
    ReportJson report;
    report["digest"] = model_digest(model);
    ReportJson mecs = ReportJson::array();
    for (const auto& mec : decomp.mecs) mecs.push_back(state_ids(model, mec));
    report["mecs"] = mecs;
    report["transient"] = state_ids(model, decomp.transient);
    ReportJson edges = ReportJson::array();
    for (const auto& [from, to] : decomp.mec_graph) {
        edges.push_back(ReportJson::array({from, to}));
    }
    report["mec_graph"] = edges;
    report["self_reentrant"] = decomp.self_reentrant;
    report["classification"] = structure_tag_name(structure.tag);
    report["bottom"] = structure.bottom;
    return report;
}

ReportJson increments_report(const Model& model, std::uint64_t cap) {
    ReportJson report;
    report["digest"] = model_digest(model);
    report["strategy_count"] = md_strategy_count(model);
    ReportJson items = ReportJson::array();
    for (const auto& inc : all_increments(model, cap)) {
        ReportJson j;
        j["value"] = rational_vector(inc.value);
        j["strategy"] = strategy_json(model, inc.strategy);
        j["bscc"] = state_ids(model, inc.bscc);
        items.push_back(j);
    }
    report["increments"] = items;
    return report;
}

ReportJson scheme_report(const Model& model, std::int64_t n, std::uint64_t cap) {
    if (!is_strongly_connected(model)) {
        throw NotStronglyConnected("scheme construction requires a strongly connected model");
    }
    ReportJson report;
    report["digest"] = model_digest(model);
    auto combo = nonneg_combination(all_increments(model, cap), model.dimension());
    if (!combo) {
        report["combination"] = nullptr;
        report["note"] = "model admits a ranking witness; no scheme exists";
        return report;
    }
    report["combination"] = combination_json(model, *combo);
    auto consts = scheme_constants(model, *combo);
    ReportJson constants;
    constants["xi"] = rational_to_string(consts.xi);
    constants["min_update"] = consts.min_update;
    constants["x_min"] = rational_to_string(consts.x_min);
    constants["lambda"] = rational_to_string(consts.lambda);
    constants["denominator"] = consts.cycle_divisor;
    report["constants"] = constants;
    auto anchors = anchor_states(model, *combo);
    report["anchors"] = state_ids(model, anchors);
    auto scheme = build_scheme(*combo, consts, n);
    ReportJson shape;
    shape["n"] = scheme.n;
    shape["cycles"] = scheme.cycles;
    ReportJson segments = ReportJson::array();
    for (const auto& seg : scheme.segments) {
        ReportJson sj;
        sj["item"] = seg.item;
        sj["steps"] = seg.steps;
        segments.push_back(sj);
    }
    shape["cycle_segments"] = segments;
    shape["increment_steps"] = scheme.increment_steps();
    shape["switches"] = scheme.switch_count();
    report["scheme"] = shape;
    return report;
}

std::string render_report(const ReportJson& report, const std::string& format) {
    if (format == "canonical") return report.dump() + "\n";
    return report.dump(2) + "\n";
}

std::string stats_to_csv(const SimStats& stats) {
    std::string csv =
        "n,trials,mean_term,stderr,q50,q90,q99,censored,event_freq,event_ci_low,event_ci_high\n";
    char buf[256];
    for (const auto& row : stats.rows) {
        std::snprintf(buf, sizeof buf, "%lld,%lld,%.6f,%.6f,%lld,%lld,%lld,%lld",
                      static_cast<long long>(row.n), static_cast<long long>(row.trials),
                      row.mean, row.stderr_mean, static_cast<long long>(row.q50),
                      static_cast<long long>(row.q90), static_cast<long long>(row.q99),
                      static_cast<long long>(row.censored));
        csv += buf;
        if (row.event_freq) {
            std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f", *row.event_freq,
                          *row.event_ci_low, *row.event_ci_high);
            csv += buf;
        } else {
            csv += ",,,";
        }
        csv += "\n";
    }
    return csv;
}

}  // namespace pvass
