#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pvass/graph.hpp"
#include "pvass/simulate.hpp"
#include "test_util.hpp"

using namespace pvass;
using testutil::load_model;
using testutil::rat;

namespace {

// Brute-force end component oracle: test every state subset for closedness
// and strong connectivity over internal transitions, keep the maximal ones.
std::vector<std::vector<int>> brute_force_mecs(const Model& model) {
    const int n = model.state_count();
    std::vector<std::vector<int>> ecs;
    for (unsigned subset = 1; subset < (1u << n); ++subset) {
        std::vector<int> members;
        for (int s = 0; s < n; ++s) {
            if (subset & (1u << s)) members.push_back(s);
        }
        auto inside = [&](int s) { return (subset & (1u << s)) != 0; };
        bool closed = true;
        for (int s : members) {
            if (model.probabilistic(s)) {
                for (int t : model.outgoing(s)) {
                    if (!inside(model.transition(t).target)) closed = false;
                }
            } else {
                bool has_internal = false;
                for (int t : model.outgoing(s)) {
                    if (inside(model.transition(t).target)) has_internal = true;
                }
                if (!has_internal) closed = false;
            }
        }
        if (!closed) continue;
        // Strong connectivity over internal transitions.
        std::vector<std::vector<int>> adj(n);
        for (const auto& t : model.transitions()) {
            if (inside(t.source) && inside(t.target)) adj[t.source].push_back(t.target);
        }
        bool connected = true;
        for (int from : members) {
            std::vector<bool> seen(n, false);
            std::vector<int> stack{from};
            seen[from] = true;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int w : adj[v]) {
                    if (!seen[w]) {
                        seen[w] = true;
                        stack.push_back(w);
                    }
                }
            }
            for (int to : members) {
                if (!seen[to]) connected = false;
            }
        }
        bool has_transition = false;
        for (const auto& t : model.transitions()) {
            if (inside(t.source) && inside(t.target)) has_transition = true;
        }
        if (connected && has_transition) ecs.push_back(members);
    }
    // Keep the maximal ones.
    std::vector<std::vector<int>> maximal;
    for (const auto& a : ecs) {
        bool contained = false;
        for (const auto& b : ecs) {
            if (a == b) continue;
            if (std::includes(b.begin(), b.end(), a.begin(), a.end())) contained = true;
        }
        if (!contained) maximal.push_back(a);
    }
    std::sort(maximal.begin(), maximal.end());
    return maximal;
}

}  // namespace

TEST_CASE("a1 is one MEC with no transient states") {
    Model a1 = load_model("a1.json");
    auto decomp = mec_decomposition(a1);
    REQUIRE(decomp.mecs.size() == 1);
    CHECK(decomp.mecs[0] == std::vector<int>{0, 1, 2, 3});
    CHECK(decomp.transient.empty());
    CHECK(brute_force_mecs(a1) == std::vector<std::vector<int>>{{0, 1, 2, 3}});
}

TEST_CASE("fig4 has three singleton MECs and a transient state") {
    Model fig4 = load_model("fig4.json");
    auto decomp = mec_decomposition(fig4);
    REQUIRE(decomp.mecs.size() == 3);
    std::set<std::string> ids;
    for (const auto& mec : decomp.mecs) {
        REQUIRE(mec.size() == 1);
        ids.insert(fig4.state(mec[0]).id);
    }
    CHECK(ids == std::set<std::string>{"p1", "p2", "f"});
    REQUIRE(decomp.transient.size() == 1);
    CHECK(fig4.state(decomp.transient[0]).id == "r");
}

TEST_CASE("single probabilistic self-loop is a singleton MEC") {
    Model m = load_model("countdown.json");
    auto decomp = mec_decomposition(m);
    REQUIRE(decomp.mecs.size() == 1);
    CHECK(decomp.mecs[0] == std::vector<int>{0});
    CHECK(decomp.transient.empty());
}

TEST_CASE("mec decomposition agrees with subset enumeration on random models") {
    for (std::uint64_t seed = 100; seed < 160; ++seed) {
        Model m = testutil::random_strongly_connected_model(seed);
        auto decomp = mec_decomposition(m);
        auto sorted = decomp.mecs;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == brute_force_mecs(m));
    }
}

TEST_CASE("structure classification") {
    Model a2 = load_model("a2.json");
    auto a2_decomp = mec_decomposition(a2);
    auto a2_class = classify_structure(a2, a2_decomp);
    CHECK(a2_class.tag == StructureTag::StronglyConnected);
    CHECK(a2_class.bottom == std::vector<int>{0});

    Model fig4 = load_model("fig4.json");
    auto fig4_decomp = mec_decomposition(fig4);
    auto fig4_class = classify_structure(fig4, fig4_decomp);
    CHECK(fig4_class.tag == StructureTag::General);
    REQUIRE(fig4_class.cycle_witness.size() == 2);
    std::set<std::string> cycle_ids{
        fig4.state(fig4_decomp.mecs[fig4_class.cycle_witness[0]][0]).id,
        fig4.state(fig4_decomp.mecs[fig4_class.cycle_witness[1]][0]).id};
    CHECK(cycle_ids == std::set<std::string>{"p1", "p2"});
    REQUIRE(fig4_class.bottom.size() == 1);
    CHECK(fig4.state(fig4_decomp.mecs[fig4_class.bottom[0]][0]).id == "f");

    // Two MECs, one path A -> B, no way back.
    Model chain = Model::from_parts(
        1,
        {{"a", StateKind::Nondeterministic}, {"b", StateKind::Nondeterministic}},
        {{"a", {0}, "a", std::nullopt},
         {"a", {0}, "b", std::nullopt},
         {"b", {-1}, "b", std::nullopt}});
    auto chain_decomp = mec_decomposition(chain);
    auto chain_class = classify_structure(chain, chain_decomp);
    REQUIRE(chain_decomp.mecs.size() == 2);
    CHECK(chain_class.tag == StructureTag::DagLike);
    REQUIRE(chain_class.bottom.size() == 1);
    CHECK(chain.state(chain_decomp.mecs[chain_class.bottom[0]][0]).id == "b");
}

TEST_CASE("mec graph is transitively closed and matches the tag") {
    for (std::uint64_t seed = 200; seed < 240; ++seed) {
        Model m = testutil::random_strongly_connected_model(seed);
        auto decomp = mec_decomposition(m);
        auto cls = classify_structure(m, decomp);
        bool mutual = false;
        for (const auto& [from, to] : decomp.mec_graph) {
            if (decomp.has_edge(to, from)) mutual = true;
        }
        if (cls.tag != StructureTag::General) {
            CHECK(!mutual);
            CHECK(decomp.self_reentrant.empty());
        } else {
            CHECK((mutual || !decomp.self_reentrant.empty()));
        }
    }
}

TEST_CASE("reach strategy on a1 toward p2") {
    Model a1 = load_model("a1.json");
    const int q1 = a1.state_index("q1");
    const int q2 = a1.state_index("q2");
    const int p2 = a1.state_index("p2");
    auto gamma = reach_strategy(a1, p2);
    CHECK(gamma.expected_steps[p2] == rat(0));
    CHECK(gamma.expected_steps[q2] == rat(1));
    CHECK(gamma.expected_steps[q1] == rat(2));
    CHECK(a1.transition(gamma.choice[q2]).target == p2);
    CHECK(a1.transition(gamma.choice[q1]).target == q2);
    CHECK(gamma.expected_change[q1] == std::vector<Rational>{rat(-1), rat(-1)});
}

TEST_CASE("reach strategy degenerate and error cases") {
    Model loop = load_model("countdown.json");
    auto gamma = reach_strategy(loop, 0);
    CHECK(gamma.expected_steps[0] == rat(0));

    Model split = Model::from_parts(
        1,
        {{"a", StateKind::Nondeterministic}, {"b", StateKind::Nondeterministic}},
        {{"a", {0}, "a", std::nullopt},
         {"b", {0}, "b", std::nullopt}});
    CHECK_THROWS_AS(reach_strategy(split, 0), NotAlmostSurelyReachable);
}

TEST_CASE("reach strategy satisfies the first-step equations exactly") {
    for (std::uint64_t seed = 300; seed < 330; ++seed) {
        Model m = testutil::random_strongly_connected_model(seed);
        const int target = static_cast<int>(seed % m.state_count());
        auto gamma = reach_strategy(m, target);
        for (int s = 0; s < m.state_count(); ++s) {
            if (s == target) {
                CHECK(gamma.expected_steps[s] == rat(0));
                continue;
            }
            Rational expected = 1;
            if (m.probabilistic(s)) {
                for (int t : m.outgoing(s)) {
                    const auto& tr = m.transition(t);
                    if (tr.target != target) expected += *tr.prob * gamma.expected_steps[tr.target];
                }
            } else {
                const auto& tr = m.transition(gamma.choice[s]);
                if (tr.target != target) expected += gamma.expected_steps[tr.target];
            }
            CHECK(gamma.expected_steps[s] == expected);
        }
    }
}

TEST_CASE("simulated hitting times match the exact expectation") {
    Model a1 = load_model("a1.json");
    const int p2 = a1.state_index("p2");
    auto gamma = reach_strategy(a1, p2);
    ModelRuntime runtime(a1);
    const int trials = 10000;
    for (int from = 0; from < a1.state_count(); ++from) {
        if (from == p2) continue;
        double sum = 0, sumsq = 0;
        for (int trial = 0; trial < trials; ++trial) {
            Rng rng = Rng::substream(777, static_cast<std::uint64_t>(from), trial);
            int state = from;
            int steps = 0;
            while (state != p2) {
                int t;
                if (a1.probabilistic(state)) {
                    t = runtime.sample(state, rng);
                } else {
                    t = gamma.choice[state];
                }
                state = a1.transition(t).target;
                ++steps;
                REQUIRE(steps < 100000);
            }
            sum += steps;
            sumsq += static_cast<double>(steps) * steps;
        }
        const double mean = sum / trials;
        const double variance = (sumsq - sum * sum / trials) / (trials - 1);
        const double stderr_mean = std::sqrt(variance / trials);
        const double exact = rational_to_double(gamma.expected_steps[from]);
        CHECK(std::abs(mean - exact) <= 3 * stderr_mean + 1e-9);
    }
}
