#include "pvass/graph.hpp"

#include <algorithm>
#include <deque>

#include "pvass/linalg.hpp"

namespace pvass {

namespace {

// Iterative Tarjan over an adjacency list. Components are emitted in reverse
// topological order; we re-sort them by smallest member for stable output.
struct TarjanScc {
    const std::vector<std::vector<int>>& adj;
    std::vector<int> index, low, comp;
    std::vector<bool> on_stack;
    std::vector<int> stack;
    int counter = 0;
    int comp_count = 0;

    explicit TarjanScc(const std::vector<std::vector<int>>& a)
        : adj(a), index(a.size(), -1), low(a.size(), 0), comp(a.size(), -1), on_stack(a.size(), false) {}

    void run(int root) {
        struct Frame {
            int v;
            std::size_t edge;
        };
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& f = frames.back();
            if (f.edge < adj[f.v].size()) {
                int w = adj[f.v][f.edge++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if (w == f.v) break;
                    }
                    ++comp_count;
                }
                int v = f.v;
                frames.pop_back();
                if (!frames.empty()) {
                    low[frames.back().v] = std::min(low[frames.back().v], low[v]);
                }
            }
        }
    }
};

}  // namespace

SccResult scc_of_adjacency(const std::vector<std::vector<int>>& adj) {
    TarjanScc tarjan(adj);
    for (std::size_t v = 0; v < adj.size(); ++v) {
        if (tarjan.index[v] < 0) tarjan.run(static_cast<int>(v));
    }
    std::vector<std::vector<int>> groups(tarjan.comp_count);
    for (std::size_t v = 0; v < adj.size(); ++v) {
        groups[tarjan.comp[v]].push_back(static_cast<int>(v));
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    SccResult result;
    result.components = std::move(groups);
    result.component_of.assign(adj.size(), -1);
    for (std::size_t c = 0; c < result.components.size(); ++c) {
        for (int v : result.components[c]) result.component_of[v] = static_cast<int>(c);
    }
    return result;
}

namespace {

std::vector<std::vector<int>> full_adjacency(const Model& model) {
    std::vector<std::vector<int>> adj(model.state_count());
    for (const auto& t : model.transitions()) adj[t.source].push_back(t.target);
    return adj;
}

std::vector<bool> reachable_from(const std::vector<std::vector<int>>& adj, int start) {
    std::vector<bool> seen(adj.size(), false);
    std::deque<int> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    return seen;
}

}  // namespace

SccResult strongly_connected_components(const Model& model) {
    return scc_of_adjacency(full_adjacency(model));
}

bool is_strongly_connected(const Model& model) {
    return strongly_connected_components(model).components.size() == 1;
}

bool MecDecomposition::has_edge(int from, int to) const {
    return std::find(mec_graph.begin(), mec_graph.end(), std::make_pair(from, to)) !=
           mec_graph.end();
}

MecDecomposition mec_decomposition(const Model& model) {
    const int n = model.state_count();
    std::vector<bool> alive(n, true);

    // Fixpoint removal: a probabilistic state must keep all successors in its
    // own component, a nondeterministic state needs at least one.
    for (;;) {
        std::vector<std::vector<int>> adj(n);
        for (const auto& t : model.transitions()) {
            if (alive[t.source] && alive[t.target]) adj[t.source].push_back(t.target);
        }
        SccResult sccs = scc_of_adjacency(adj);
        bool removed = false;
        for (int s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            bool keep;
            if (model.probabilistic(s)) {
                keep = true;
                for (int t : model.outgoing(s)) {
                    int target = model.transition(t).target;
                    if (!alive[target] || sccs.component_of[target] != sccs.component_of[s]) {
                        keep = false;
                        break;
                    }
                }
            } else {
                keep = false;
                for (int t : model.outgoing(s)) {
                    int target = model.transition(t).target;
                    if (alive[target] && sccs.component_of[target] == sccs.component_of[s]) {
                        keep = true;
                        break;
                    }
                }
            }
            if (!keep) {
                alive[s] = false;
                removed = true;
            }
        }
        if (!removed) {
            MecDecomposition result;
            result.mec_of.assign(n, -1);
            for (const auto& component : sccs.components) {
                std::vector<int> members;
                for (int s : component) {
                    if (alive[s]) members.push_back(s);
                }
                if (members.empty()) continue;
                int idx = static_cast<int>(result.mecs.size());
                for (int s : members) result.mec_of[s] = idx;
                result.mecs.push_back(std::move(members));
            }
            for (int s = 0; s < n; ++s) {
                if (!alive[s]) result.transient.push_back(s);
            }

            auto adj_full = full_adjacency(model);
            std::vector<std::vector<bool>> reach(result.mecs.size());
            for (std::size_t m = 0; m < result.mecs.size(); ++m) {
                reach[m] = reachable_from(adj_full, result.mecs[m].front());
            }
            for (std::size_t a = 0; a < result.mecs.size(); ++a) {
                for (std::size_t b = 0; b < result.mecs.size(); ++b) {
                    if (a == b) continue;
                    if (reach[a][result.mecs[b].front()]) {
                        result.mec_graph.emplace_back(static_cast<int>(a), static_cast<int>(b));
                    }
                }
            }
            // A MEC is re-entrant when some transition leaves it for a state
            // from which the MEC is reachable again.
            for (std::size_t m = 0; m < result.mecs.size(); ++m) {
                bool reentrant = false;
                for (int s : result.mecs[m]) {
                    for (int t : model.outgoing(s)) {
                        int target = model.transition(t).target;
                        if (result.mec_of[target] == static_cast<int>(m)) continue;
                        if (reachable_from(adj_full, target)[result.mecs[m].front()]) {
                            reentrant = true;
                            break;
                        }
                    }
                    if (reentrant) break;
                }
                if (reentrant) result.self_reentrant.push_back(static_cast<int>(m));
            }
            return result;
        }
    }
}

InducedSubModel induced_sub_model(const Model& model, const std::vector<int>& mec_states) {
    std::vector<int> to_sub(model.state_count(), -1);
    std::vector<State> states;
    for (int s : mec_states) {
        to_sub[s] = static_cast<int>(states.size());
        states.push_back(model.state(s));
    }
    std::vector<Transition> transitions;
    std::vector<int> tmap;
    for (std::size_t t = 0; t < model.transitions().size(); ++t) {
        const auto& tr = model.transitions()[t];
        if (to_sub[tr.source] < 0 || to_sub[tr.target] < 0) continue;
        transitions.push_back(Transition{to_sub[tr.source], to_sub[tr.target], tr.update, tr.prob});
        tmap.push_back(static_cast<int>(t));
    }
    return InducedSubModel{Model(model.dimension(), std::move(states), std::move(transitions)),
                           mec_states, std::move(tmap)};
}

StructureClass classify_structure(const Model& model, const MecDecomposition& decomp) {
    StructureClass result;
    for (std::size_t m = 0; m < decomp.mecs.size(); ++m) {
        bool has_out = false;
        for (const auto& [from, to] : decomp.mec_graph) {
            if (from == static_cast<int>(m)) {
                has_out = true;
                break;
            }
        }
        if (!has_out) result.bottom.push_back(static_cast<int>(m));
    }
    if (decomp.mecs.size() == 1 && decomp.transient.empty()) {
        result.tag = StructureTag::StronglyConnected;
        return result;
    }
    for (const auto& [from, to] : decomp.mec_graph) {
        if (from < to && decomp.has_edge(to, from)) {
            result.tag = StructureTag::General;
            result.cycle_witness = {from, to};
            return result;
        }
    }
    if (!decomp.self_reentrant.empty()) {
        result.tag = StructureTag::General;
        result.cycle_witness = {decomp.self_reentrant.front()};
        return result;
    }
    result.tag = StructureTag::DagLike;
    return result;
}

const char* structure_tag_name(StructureTag tag) {
    switch (tag) {
        case StructureTag::StronglyConnected: return "StronglyConnected";
        case StructureTag::DagLike: return "DagLike";
        case StructureTag::General: return "General";
    }
    return "General";
}

namespace {

// Set of states from which some strategy reaches `target` with probability
// one: greatest fixpoint over positive-reachability closures.
std::vector<bool> almost_sure_states(const Model& model, int target) {
    const int n = model.state_count();
    std::vector<bool> s(n, true);
    for (;;) {
        std::vector<bool> r(n, false);
        r[target] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            for (int q = 0; q < n; ++q) {
                if (r[q] || !s[q]) continue;
                bool add;
                if (model.probabilistic(q)) {
                    bool stays = true, hits = false;
                    for (int t : model.outgoing(q)) {
                        int tgt = model.transition(t).target;
                        if (!s[tgt]) stays = false;
                        if (r[tgt]) hits = true;
                    }
                    add = stays && hits;
                } else {
                    add = false;
                    for (int t : model.outgoing(q)) {
                        if (r[model.transition(t).target]) {
                            add = true;
                            break;
                        }
                    }
                }
                if (add) {
                    r[q] = true;
                    grew = true;
                }
            }
        }
        if (r == s) return s;
        s = std::move(r);
    }
}

// Expected hitting times (and accumulated counter change) for a fixed choice
// vector, solved exactly. Returns nullopt if the policy is improper.
struct PolicyValues {
    std::vector<Rational> steps;
    std::vector<std::vector<Rational>> change;
};

std::optional<PolicyValues> evaluate_policy(const Model& model, int target,
                                            const std::vector<int>& choice) {
    const int n = model.state_count();
    const int d = model.dimension();
    std::vector<int> row_of(n, -1);
    std::vector<int> unknown;
    for (int s = 0; s < n; ++s) {
        if (s == target) continue;
        row_of[s] = static_cast<int>(unknown.size());
        unknown.push_back(s);
    }
    const int m = static_cast<int>(unknown.size());
    Matrix a(m, std::vector<Rational>(m, Rational(0)));
    Matrix b(m, std::vector<Rational>(1 + d, Rational(0)));
    for (int r = 0; r < m; ++r) {
        int s = unknown[r];
        a[r][r] += 1;
        auto account = [&](int t, const Rational& p) {
            const auto& tr = model.transition(t);
            b[r][0] += p;
            for (int j = 0; j < d; ++j) {
                b[r][1 + j] += p * Rational(static_cast<long>(tr.update[j]));
            }
            if (tr.target != target) a[r][row_of[tr.target]] -= p;
        };
        if (model.probabilistic(s)) {
            for (int t : model.outgoing(s)) account(t, *model.transition(t).prob);
        } else {
            account(choice[s], Rational(1));
        }
    }
    auto solved = solve_linear(std::move(a), std::move(b));
    if (!solved) return std::nullopt;
    PolicyValues values;
    values.steps.assign(n, Rational(0));
    values.change.assign(n, std::vector<Rational>(d, Rational(0)));
    for (int r = 0; r < m; ++r) {
        values.steps[unknown[r]] = (*solved)[r][0];
        if (values.steps[unknown[r]] < 0) return std::nullopt;
        for (int j = 0; j < d; ++j) values.change[unknown[r]][j] = (*solved)[r][1 + j];
    }
    return values;
}

}  // namespace

ReachStrategy reach_strategy(const Model& model, int target) {
    const int n = model.state_count();
    auto safe = almost_sure_states(model, target);
    for (int s = 0; s < n; ++s) {
        if (!safe[s]) throw NotAlmostSurelyReachable(model.state(s).id);
    }

    // Seed with hop-count-greedy choices; proper because every state has a
    // bounded-length positive-probability path to the target under it.
    std::vector<int> dist(n, -1);
    dist[target] = 0;
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& t : model.transitions()) {
            if (dist[t.target] >= 0 && dist[t.source] < 0) {
                dist[t.source] = dist[t.target] + 1;
                grew = true;
            }
        }
    }
    std::vector<int> choice(n, -1);
    for (int s = 0; s < n; ++s) {
        if (model.probabilistic(s) || s == target) continue;
        int best = -1;
        for (int t : model.outgoing(s)) {
            int tgt = model.transition(t).target;
            if (dist[tgt] < 0) continue;
            if (best < 0 || dist[tgt] < dist[model.transition(best).target]) best = t;
        }
        if (best < 0) throw std::logic_error("unreachable state slipped past the prob1 check");
        choice[s] = best;
    }
    // Target's own choice is irrelevant for hitting times; keep a fixed one
    // so the strategy is total.
    if (!model.probabilistic(target)) choice[target] = model.outgoing(target).front();

    // Policy iteration with strict improvement, then a declaration-order
    // tie-break pass at the optimum.
    auto evaluate = [&](const std::vector<int>& policy) {
        auto values = evaluate_policy(model, target, policy);
        if (!values) {
            throw std::logic_error("hitting-time policy evaluation hit an improper policy");
        }
        return std::move(*values);
    };
    auto values = evaluate(choice);
    for (;;) {
        bool improved = false;
        for (int s = 0; s < n; ++s) {
            if (model.probabilistic(s) || s == target) continue;
            for (int t : model.outgoing(s)) {
                int tgt = model.transition(t).target;
                Rational candidate = Rational(1) + values.steps[tgt];
                if (tgt == target) candidate = 1;
                if (candidate < values.steps[s]) {
                    choice[s] = t;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) break;
        values = evaluate(choice);
    }
    for (int s = 0; s < n; ++s) {
        if (model.probabilistic(s) || s == target) continue;
        for (int t : model.outgoing(s)) {
            int tgt = model.transition(t).target;
            Rational candidate = (tgt == target) ? Rational(1) : Rational(1) + values.steps[tgt];
            if (candidate == values.steps[s]) {
                choice[s] = t;
                break;
            }
        }
    }
    values = evaluate(choice);

    ReachStrategy result;
    result.target = target;
    result.choice = std::move(choice);
    for (int s = 0; s < n; ++s) {
        if (model.probabilistic(s)) result.choice[s] = -1;
    }
    result.expected_steps = std::move(values.steps);
    result.expected_change = std::move(values.change);
    return result;
}

}  // namespace pvass
