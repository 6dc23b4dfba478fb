#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "pvass/model.hpp"
#include "pvass/rng.hpp"

namespace pvass::testutil {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string models_dir() { return PVASS_MODELS_DIR; }

inline Model load_model(const std::string& name) {
    return parse_model(read_file(models_dir() + "/" + name));
}

inline Rational rat(long num, long den = 1) { return make_rational(num, den); }

// Seeded random strongly connected models used across oracles and
// acceptance: |Q| <= 5, d <= 3, updates in [-2, 2], probability
// denominators <= 4. A base cycle guarantees strong connectivity.
inline Model random_strongly_connected_model(std::uint64_t seed) {
    Rng rng = Rng::substream(seed, 0xc0de, 0);
    const int nstates = 1 + static_cast<int>(rng.next_below(5));
    const int dim = 1 + static_cast<int>(rng.next_below(3));
    std::vector<State> states;
    for (int s = 0; s < nstates; ++s) {
        bool probabilistic = rng.next_below(2) == 0;
        states.push_back(State{"s" + std::to_string(s),
                               probabilistic ? StateKind::Probabilistic
                                             : StateKind::Nondeterministic});
    }
    auto random_update = [&]() {
        std::vector<std::int64_t> update(dim);
        for (int j = 0; j < dim; ++j) {
            update[j] = static_cast<std::int64_t>(rng.next_below(5)) - 2;
        }
        return update;
    };
    std::vector<Model::SymbolicTransition> transitions;
    for (int s = 0; s < nstates; ++s) {
        const int extra =
            states[s].kind == StateKind::Probabilistic
                ? static_cast<int>(rng.next_below(3))
                : static_cast<int>(rng.next_below(3));
        std::vector<int> targets{(s + 1) % nstates};
        for (int e = 0; e < extra; ++e) {
            targets.push_back(static_cast<int>(rng.next_below(nstates)));
        }
        if (states[s].kind == StateKind::Probabilistic) {
            // Split probability into positive parts with denominator <= 4.
            const int k = static_cast<int>(targets.size());
            const int denominator = k + static_cast<int>(rng.next_below(5 - k));
            std::vector<long> parts(k, 1);
            for (int unit = k; unit < denominator; ++unit) {
                parts[rng.next_below(k)] += 1;
            }
            for (int i = 0; i < k; ++i) {
                transitions.push_back(Model::SymbolicTransition{
                    states[s].id, random_update(), states[targets[i]].id,
                    make_rational(parts[i], denominator)});
            }
        } else {
            for (int target : targets) {
                transitions.push_back(Model::SymbolicTransition{
                    states[s].id, random_update(), states[target].id, std::nullopt});
            }
        }
    }
    Model model = Model::from_parts(dim, std::move(states), std::move(transitions));
    REQUIRE(validate(model).empty());
    return model;
}

}  // namespace pvass::testutil
