#include "pvass/decide.hpp"

#include <algorithm>

#include "pvass/lp.hpp"

namespace pvass {

namespace {

void require_strongly_connected_scalar(const ScalarModel& m) {
    std::vector<std::vector<int>> adj(m.states.size());
    for (const auto& e : m.edges) adj[e.source].push_back(e.target);
    if (scc_of_adjacency(adj).components.size() != 1) {
        throw NotStronglyConnected("mean-payoff analysis requires a strongly connected model");
    }
}

MeanPayoffSolution solve_mean_payoff(const ScalarModel& m, PayoffDirection direction) {
    require_strongly_connected_scalar(m);
    const int n = static_cast<int>(m.states.size());
    LinearProgram lp;
    const bool maximize_payoff = direction == PayoffDirection::Max;
    int x = lp.add_variable("x");
    std::vector<int> z(n);
    for (int s = 0; s < n; ++s) {
        // The minimizing program admits nonnegative potentials; pinning them
        // keeps the reported solution canonical.
        z[s] = lp.add_variable("z_" + m.states[s].id,
                               maximize_payoff ? std::optional<Rational>() : Rational(0));
    }
    const int nvars = n + 1;
    auto row = [&]() { return std::vector<Rational>(nvars, Rational(0)); };
    for (int s = 0; s < n; ++s) {
        if (m.probabilistic(s)) {
            // z_q >= -x + sum P (c + z_p)   (resp. <= for the minimum)
            auto coeffs = row();
            coeffs[z[s]] += 1;
            coeffs[x] += 1;
            Rational rhs = 0;
            for (int e : m.outgoing[s]) {
                const auto& edge = m.edges[e];
                coeffs[z[edge.target]] -= *edge.prob;
                rhs += *edge.prob * edge.weight;
            }
            lp.add_constraint(std::move(coeffs),
                              maximize_payoff ? LinearProgram::Relation::GreaterEq
                                              : LinearProgram::Relation::LessEq,
                              rhs);
        } else {
            for (int e : m.outgoing[s]) {
                const auto& edge = m.edges[e];
                auto coeffs = row();
                coeffs[z[s]] += 1;
                coeffs[x] += 1;
                coeffs[z[edge.target]] -= 1;
                lp.add_constraint(std::move(coeffs),
                                  maximize_payoff ? LinearProgram::Relation::GreaterEq
                                                  : LinearProgram::Relation::LessEq,
                                  edge.weight);
            }
        }
    }
    std::vector<Rational> objective(nvars, Rational(0));
    objective[x] = 1;
    lp.objective = objective;
    lp.direction = maximize_payoff ? LinearProgram::Direction::Minimize
                                   : LinearProgram::Direction::Maximize;
    LpOutcome outcome = solve_lp(lp);
    if (outcome.status != LpOutcome::Status::Optimal) {
        throw std::logic_error("mean-payoff program did not reach an optimum");
    }
    MeanPayoffSolution solution;
    solution.direction = direction;
    solution.value = outcome.assignment[x];
    solution.potentials.resize(n);
    for (int s = 0; s < n; ++s) solution.potentials[s] = outcome.assignment[z[s]];
    return solution;
}

// Stationary-frequency constraints shared by the achievability and optimal
// flow programs: one nonnegative variable per transition, flow conservation
// at every state, probabilistic splitting, total mass one.
void add_flow_constraints(const Model& model, LinearProgram& lp) {
    const int nt = static_cast<int>(model.transitions().size());
    for (int t = 0; t < nt; ++t) {
        lp.add_variable("y_" + std::to_string(t), Rational(0));
    }
    for (int s = 0; s < model.state_count(); ++s) {
        std::vector<Rational> coeffs(nt, Rational(0));
        for (int t = 0; t < nt; ++t) {
            if (model.transition(t).target == s) coeffs[t] += 1;
            if (model.transition(t).source == s) coeffs[t] -= 1;
        }
        lp.add_constraint(std::move(coeffs), LinearProgram::Relation::Equal, Rational(0));
    }
    for (int s = 0; s < model.state_count(); ++s) {
        if (!model.probabilistic(s)) continue;
        for (int t : model.outgoing(s)) {
            std::vector<Rational> coeffs(nt, Rational(0));
            coeffs[t] += 1;
            for (int u : model.outgoing(s)) coeffs[u] -= *model.transition(t).prob;
            lp.add_constraint(std::move(coeffs), LinearProgram::Relation::Equal, Rational(0));
        }
    }
    std::vector<Rational> total(nt, Rational(1));
    lp.add_constraint(std::move(total), LinearProgram::Relation::Equal, Rational(1));
}

}  // namespace

MeanPayoffSolution max_mean_payoff(const ScalarModel& m) {
    return solve_mean_payoff(m, PayoffDirection::Max);
}

MeanPayoffSolution min_mean_payoff(const ScalarModel& m) {
    return solve_mean_payoff(m, PayoffDirection::Min);
}

bool zero_achievable(const Model& model) {
    if (!is_strongly_connected(model)) {
        throw NotStronglyConnected("zero_achievable requires a strongly connected model");
    }
    LinearProgram lp;
    add_flow_constraints(model, lp);
    const int nt = static_cast<int>(model.transitions().size());
    for (int j = 0; j < model.dimension(); ++j) {
        std::vector<Rational> coeffs(nt, Rational(0));
        for (int t = 0; t < nt; ++t) {
            coeffs[t] = Rational(static_cast<long>(model.transition(t).update[j]));
        }
        lp.add_constraint(std::move(coeffs), LinearProgram::Relation::GreaterEq, Rational(0));
    }
    return solve_lp(lp).solved();
}

OptimalFlow demonic_optimal_flow(const Model& model) {
    if (!is_strongly_connected(model)) {
        throw NotStronglyConnected("demonic_optimal_flow requires a strongly connected model");
    }
    LinearProgram lp;
    add_flow_constraints(model, lp);
    const int nt = static_cast<int>(model.transitions().size());
    const int g = lp.add_variable("g");
    for (int j = 0; j < model.dimension(); ++j) {
        std::vector<Rational> coeffs(nt + 1, Rational(0));
        for (int t = 0; t < nt; ++t) {
            coeffs[t] = Rational(static_cast<long>(model.transition(t).update[j]));
        }
        coeffs[g] = -1;
        lp.add_constraint(std::move(coeffs), LinearProgram::Relation::GreaterEq, Rational(0));
    }
    std::vector<Rational> objective(nt + 1, Rational(0));
    objective[g] = 1;
    lp.objective = objective;
    lp.direction = LinearProgram::Direction::Maximize;
    LpOutcome outcome = solve_lp(lp);
    if (outcome.status != LpOutcome::Status::Optimal) {
        throw std::logic_error("demonic flow program did not reach an optimum");
    }
    OptimalFlow flow;
    flow.value = outcome.assignment[g];
    flow.frequency.assign(outcome.assignment.begin(), outcome.assignment.begin() + nt);
    return flow;
}

OptimalFlow angelic_optimal_flow(const Model& model, int counter) {
    if (!is_strongly_connected(model)) {
        throw NotStronglyConnected("angelic_optimal_flow requires a strongly connected model");
    }
    if (counter < 0 || counter >= model.dimension()) {
        throw std::out_of_range("counter index out of range");
    }
    LinearProgram lp;
    add_flow_constraints(model, lp);
    const int nt = static_cast<int>(model.transitions().size());
    std::vector<Rational> objective(nt, Rational(0));
    for (int t = 0; t < nt; ++t) {
        objective[t] = Rational(static_cast<long>(model.transition(t).update[counter]));
    }
    lp.objective = objective;
    lp.direction = LinearProgram::Direction::Minimize;
    LpOutcome outcome = solve_lp(lp);
    if (outcome.status != LpOutcome::Status::Optimal) {
        throw std::logic_error("angelic flow program did not reach an optimum");
    }
    OptimalFlow flow;
    flow.value = outcome.value;
    flow.frequency = outcome.assignment;
    return flow;
}

std::optional<RankingCertificate> ranking_witness(const Model& model) {
    if (!is_strongly_connected(model)) {
        throw NotStronglyConnected("ranking_witness requires a strongly connected model");
    }
    const int d = model.dimension();
    const int n = model.state_count();
    LinearProgram lp;
    std::vector<int> w(d);
    for (int j = 0; j < d; ++j) w[j] = lp.add_variable("w" + std::to_string(j), Rational(1));
    std::vector<int> z(n);
    for (int s = 0; s < n; ++s) z[s] = lp.add_variable("z_" + model.state(s).id);
    const int nvars = d + n;
    for (int s = 0; s < n; ++s) {
        if (model.probabilistic(s)) {
            // z_q - sum P z_p - sum P (w . u) >= 1
            std::vector<Rational> coeffs(nvars, Rational(0));
            coeffs[z[s]] += 1;
            for (int t : model.outgoing(s)) {
                const auto& tr = model.transition(t);
                coeffs[z[tr.target]] -= *tr.prob;
                for (int j = 0; j < d; ++j) {
                    coeffs[w[j]] -= *tr.prob * Rational(static_cast<long>(tr.update[j]));
                }
            }
            lp.add_constraint(std::move(coeffs), LinearProgram::Relation::GreaterEq, Rational(1));
        } else {
            for (int t : model.outgoing(s)) {
                const auto& tr = model.transition(t);
                std::vector<Rational> coeffs(nvars, Rational(0));
                coeffs[z[s]] += 1;
                coeffs[z[tr.target]] -= 1;
                for (int j = 0; j < d; ++j) {
                    coeffs[w[j]] -= Rational(static_cast<long>(tr.update[j]));
                }
                lp.add_constraint(std::move(coeffs), LinearProgram::Relation::GreaterEq,
                                  Rational(1));
            }
        }
    }
    LpOutcome outcome = solve_lp(lp);
    if (!outcome.solved()) return std::nullopt;
    RankingCertificate cert;
    cert.w.resize(d);
    for (int j = 0; j < d; ++j) cert.w[j] = outcome.assignment[w[j]];
    for (int s = 0; s < n; ++s) cert.z[model.state(s).id] = outcome.assignment[z[s]];
    cert.slack = 1;
    return cert;
}

std::optional<std::string> check_ranking_certificate(const Model& model,
                                                     const RankingCertificate& cert) {
    if (static_cast<int>(cert.w.size()) != model.dimension()) {
        return "w has length " + std::to_string(cert.w.size()) + ", model dimension is " +
               std::to_string(model.dimension());
    }
    if (cert.slack < 1) {
        return "slack must be >= 1";
    }
    for (int j = 0; j < model.dimension(); ++j) {
        if (cert.w[j] < 1) {
            return "w(" + std::to_string(j + 1) + ") must be >= 1";
        }
    }
    for (const auto& s : model.states()) {
        if (!cert.z.count(s.id)) return "missing potential for state " + s.id;
    }
    auto weighted = [&](const Transition& t) {
        Rational sum = 0;
        for (int j = 0; j < model.dimension(); ++j) {
            sum += cert.w[j] * Rational(static_cast<long>(t.update[j]));
        }
        return sum;
    };
    for (int s = 0; s < model.state_count(); ++s) {
        const Rational zq = cert.z.at(model.state(s).id);
        if (model.probabilistic(s)) {
            Rational expected = 0;
            for (int t : model.outgoing(s)) {
                const auto& tr = model.transition(t);
                expected += *tr.prob * (weighted(tr) + cert.z.at(model.state(tr.target).id));
            }
            if (zq < cert.slack + expected) {
                return "probabilistic state " + model.state(s).id +
                       " violates z >= slack + E[w.u + z]";
            }
        } else {
            for (int t : model.outgoing(s)) {
                const auto& tr = model.transition(t);
                if (zq < cert.slack + weighted(tr) + cert.z.at(model.state(tr.target).id)) {
                    return "transition " + model.state(s).id + " -> " +
                           model.state(tr.target).id + " violates z >= slack + w.u + z'";
                }
            }
        }
    }
    return std::nullopt;
}

const char* verdict_tag_name(VerdictTag tag) {
    switch (tag) {
        case VerdictTag::Linear: return "Linear";
        case VerdictTag::NotLinear: return "NotLinear";
        case VerdictTag::UnsupportedStructure: return "UnsupportedStructure";
    }
    return "UnsupportedStructure";
}

namespace {

MecVerdict decide_demonic_mec(const Model& sub, int mec_index, std::uint64_t cap) {
    MecVerdict verdict;
    verdict.mec_index = mec_index;
    if (auto cert = ranking_witness(sub)) {
        verdict.tag = VerdictTag::Linear;
        verdict.certificate = std::move(cert);
        return verdict;
    }
    verdict.tag = VerdictTag::NotLinear;
    auto combo = nonneg_combination(all_increments(sub, cap), sub.dimension());
    if (!combo) {
        throw std::logic_error("no ranking witness and no nonnegative combination; "
                               "the two programs disagree");
    }
    verdict.combination = std::move(combo);
    return verdict;
}

}  // namespace

Verdict decide_demonic(const Model& model, std::uint64_t cap) {
    auto decomp = mec_decomposition(model);
    auto structure = classify_structure(model, decomp);
    Verdict verdict;
    verdict.mode = AnalysisMode::Demonic;
    verdict.structure = structure.tag;
    if (structure.tag == StructureTag::General) {
        verdict.tag = VerdictTag::UnsupportedStructure;
        for (int m : structure.cycle_witness) {
            std::vector<std::string> ids;
            for (int s : decomp.mecs[m]) ids.push_back(model.state(s).id);
            verdict.cycle_witness.push_back(std::move(ids));
        }
        // Per-MEC sub-verdicts are still informative diagnostics.
        for (std::size_t m = 0; m < decomp.mecs.size(); ++m) {
            auto sub = induced_sub_model(model, decomp.mecs[m]);
            verdict.per_mec.push_back(decide_demonic_mec(sub.model, static_cast<int>(m), cap));
        }
        return verdict;
    }
    verdict.tag = VerdictTag::Linear;
    for (std::size_t m = 0; m < decomp.mecs.size(); ++m) {
        auto sub = induced_sub_model(model, decomp.mecs[m]);
        auto mec_verdict = decide_demonic_mec(sub.model, static_cast<int>(m), cap);
        if (mec_verdict.tag == VerdictTag::NotLinear) verdict.tag = VerdictTag::NotLinear;
        verdict.per_mec.push_back(std::move(mec_verdict));
    }
    return verdict;
}

Verdict decide_angelic(const Model& model) {
    auto decomp = mec_decomposition(model);
    auto structure = classify_structure(model, decomp);
    Verdict verdict;
    verdict.mode = AnalysisMode::Angelic;
    verdict.structure = structure.tag;
    verdict.tag = VerdictTag::Linear;
    for (int m : structure.bottom) {
        auto sub = induced_sub_model(model, decomp.mecs[m]);
        MecVerdict mec_verdict;
        mec_verdict.mec_index = m;
        mec_verdict.tag = VerdictTag::NotLinear;
        for (int j = 0; j < model.dimension(); ++j) {
            auto solution = min_mean_payoff(as_scalar(sub.model.project_counter(j)));
            ProjectionOutcome outcome;
            outcome.counter = j;
            outcome.value = solution.value;
            outcome.potentials = solution.potentials;
            if (solution.value < 0 && mec_verdict.tag == VerdictTag::NotLinear) {
                mec_verdict.tag = VerdictTag::Linear;
                mec_verdict.linear_counter = j;
            }
            mec_verdict.projections.push_back(std::move(outcome));
        }
        if (mec_verdict.tag == VerdictTag::NotLinear) verdict.tag = VerdictTag::NotLinear;
        verdict.per_mec.push_back(std::move(mec_verdict));
    }
    return verdict;
}

}  // namespace pvass
