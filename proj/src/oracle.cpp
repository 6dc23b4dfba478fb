#include "pvass/oracle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "pvass/graph.hpp"
#include "pvass/linalg.hpp"
#include "pvass/lp.hpp"

namespace pvass {

std::uint64_t md_strategy_count(const Model& model) {
    std::uint64_t count = 1;
    for (int s : model.nondeterministic_states()) {
        std::uint64_t outdeg = model.outgoing(s).size();
        if (outdeg == 0) continue;  // invalid models are the validator's job
        if (count > UINT64_MAX / outdeg) return UINT64_MAX;
        count *= outdeg;
    }
    return count;
}

std::vector<MdStrategy> enumerate_md_strategies(const Model& model, std::uint64_t cap) {
    const std::uint64_t count = md_strategy_count(model);
    if (count > cap) {
        throw ResourceLimit("MD strategy count " + std::to_string(count) +
                            " exceeds cap " + std::to_string(cap));
    }
    auto nondet = model.nondeterministic_states();
    std::vector<std::size_t> odometer(nondet.size(), 0);
    std::vector<MdStrategy> strategies;
    strategies.reserve(count);
    for (;;) {
        MdStrategy s;
        s.choice.assign(model.state_count(), -1);
        for (std::size_t i = 0; i < nondet.size(); ++i) {
            s.choice[nondet[i]] = model.outgoing(nondet[i])[odometer[i]];
        }
        strategies.push_back(std::move(s));
        int pos = static_cast<int>(nondet.size()) - 1;
        while (pos >= 0 && odometer[pos] + 1 == model.outgoing(nondet[pos]).size()) {
            odometer[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++odometer[pos];
    }
    return strategies;
}

namespace {

// BSCCs of the Markov chain induced by fixing the strategy's choices.
std::vector<std::vector<int>> induced_bsccs(const Model& model, const MdStrategy& strategy) {
    std::vector<std::vector<int>> adj(model.state_count());
    for (int s = 0; s < model.state_count(); ++s) {
        if (model.probabilistic(s)) {
            for (int t : model.outgoing(s)) adj[s].push_back(model.transition(t).target);
        } else {
            adj[s].push_back(model.transition(strategy.choice[s]).target);
        }
    }
    SccResult sccs = scc_of_adjacency(adj);
    std::vector<std::vector<int>> result;
    for (const auto& component : sccs.components) {
        bool bottom = true;
        for (int v : component) {
            for (int w : adj[v]) {
                if (sccs.component_of[w] != sccs.component_of[v]) {
                    bottom = false;
                    break;
                }
            }
            if (!bottom) break;
        }
        if (bottom) result.push_back(component);
    }
    return result;
}

}  // namespace

std::vector<Increment> bscc_increments(const Model& model, const MdStrategy& strategy) {
    std::vector<Increment> result;
    for (auto& bscc : induced_bsccs(model, strategy)) {
        std::vector<int> pos(model.state_count(), -1);
        for (std::size_t i = 0; i < bscc.size(); ++i) pos[bscc[i]] = static_cast<int>(i);
        const int m = static_cast<int>(bscc.size());

        // Stationary distribution: eta P = eta with sum 1, solved exactly on
        // the transposed system with the last row replaced by normalization.
        Matrix a(m, std::vector<Rational>(m, Rational(0)));
        std::vector<Rational> rhs(m, Rational(0));
        auto add_flow = [&](int from, int to, const Rational& p) {
            a[pos[to]][pos[from]] += p;
        };
        for (int s : bscc) {
            if (model.probabilistic(s)) {
                for (int t : model.outgoing(s)) {
                    add_flow(s, model.transition(t).target, *model.transition(t).prob);
                }
            } else {
                add_flow(s, model.transition(strategy.choice[s]).target, Rational(1));
            }
        }
        for (int i = 0; i < m; ++i) a[i][i] -= 1;
        for (int j = 0; j < m; ++j) a[m - 1][j] = 1;
        rhs[m - 1] = 1;
        auto eta = solve_linear(std::move(a), std::move(rhs));
        if (!eta) {
            throw std::logic_error("stationary distribution system is singular");
        }

        Increment inc;
        inc.value.assign(model.dimension(), Rational(0));
        for (int s : bscc) {
            const Rational& weight = (*eta)[pos[s]];
            if (model.probabilistic(s)) {
                for (int t : model.outgoing(s)) {
                    const auto& tr = model.transition(t);
                    for (int j = 0; j < model.dimension(); ++j) {
                        inc.value[j] += weight * *tr.prob * Rational(static_cast<long>(tr.update[j]));
                    }
                }
            } else {
                const auto& tr = model.transition(strategy.choice[s]);
                for (int j = 0; j < model.dimension(); ++j) {
                    inc.value[j] += weight * Rational(static_cast<long>(tr.update[j]));
                }
            }
        }
        inc.strategy = strategy;
        inc.bscc = bscc;
        inc.stationary = *eta;
        result.push_back(std::move(inc));
    }
    return result;
}

std::vector<Increment> all_increments(const Model& model, std::uint64_t cap) {
    std::vector<Increment> distinct;
    for (const auto& strategy : enumerate_md_strategies(model, cap)) {
        for (auto& inc : bscc_increments(model, strategy)) {
            bool seen = false;
            for (const auto& known : distinct) {
                if (known.value == inc.value) {
                    seen = true;
                    break;
                }
            }
            if (!seen) distinct.push_back(std::move(inc));
        }
    }
    return distinct;
}

std::vector<std::vector<Rational>> increment_values(const std::vector<Increment>& increments) {
    std::vector<std::vector<Rational>> values;
    values.reserve(increments.size());
    for (const auto& inc : increments) values.push_back(inc.value);
    return values;
}

std::optional<std::vector<Rational>> separating_normal_bruteforce(
    const std::vector<std::vector<Rational>>& increments, int dimension) {
    LinearProgram lp;
    for (int j = 0; j < dimension; ++j) {
        lp.add_variable("w" + std::to_string(j), Rational(1));
    }
    for (const auto& inc : increments) {
        std::vector<Rational> row(inc.begin(), inc.end());
        lp.add_constraint(std::move(row), LinearProgram::Relation::LessEq, Rational(-1));
    }
    LpOutcome outcome = solve_lp(lp);
    if (!outcome.solved()) return std::nullopt;
    return outcome.assignment;
}

}  // namespace pvass
