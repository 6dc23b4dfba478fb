#pragma once

#include <string>
#include <vector>

#include "pvass/model.hpp"
#include "pvass/simulate.hpp"

namespace pvass {

// Counter-guarded choice rules, tried in order; the first matching rule
// fires. A reached nondeterministic configuration with no matching rule is a
// runtime error.
struct ScriptedStrategy {
    enum class Cmp { Lt, Le, Gt, Ge, Eq, Ne };
    struct Guard {
        bool always = true;
        int counter = 0;  // 0-based
        Cmp cmp = Cmp::Gt;
        std::int64_t value = 0;

        bool holds(std::span<const std::int64_t> counters) const;
    };
    struct Rule {
        int state = 0;
        Guard guard;
        int transition = 0;  // global transition index
    };
    std::vector<Rule> rules;
};

// Parses the script file format:
//   {"rules": [{"state": "p1", "when": "c2 > 0", "to": "p1"}, ...]}
// "when" defaults to always; the transition is named by target id ("to") or
// by outgoing index ("index").
ScriptedStrategy parse_script(const Model& model, const std::string& text);

class ScriptedRunStrategy : public RunStrategy {
public:
    ScriptedRunStrategy(const Model& model, ScriptedStrategy script)
        : model_(&model), script_(std::move(script)) {}
    int choose(int state, std::span<const std::int64_t> counters, Rng& rng) override;

private:
    const Model* model_;
    ScriptedStrategy script_;
};

StrategyFactory script_factory(const Model& model, ScriptedStrategy script,
                               const struct StartSpec& start);

}  // namespace pvass
