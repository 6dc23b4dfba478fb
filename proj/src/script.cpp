#include "pvass/script.hpp"

#include <json.hpp>

#include "pvass/strategies.hpp"

namespace pvass {

bool ScriptedStrategy::Guard::holds(std::span<const std::int64_t> counters) const {
    if (always) return true;
    const std::int64_t c = counters[counter];
    switch (cmp) {
        case Cmp::Lt: return c < value;
        case Cmp::Le: return c <= value;
        case Cmp::Gt: return c > value;
        case Cmp::Ge: return c >= value;
        case Cmp::Eq: return c == value;
        case Cmp::Ne: return c != value;
    }
    return false;
}

namespace {

ScriptedStrategy::Guard parse_guard(const std::string& text, int dimension) {
    ScriptedStrategy::Guard guard;
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    if (s == "true") return guard;
    if (s.empty() || s[0] != 'c') {
        throw ParseError("script guard must look like \"c<k> <op> <int>\": " + text);
    }
    std::size_t pos = 1;
    std::size_t digits = pos;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
    if (digits == pos) throw ParseError("missing counter index in script guard: " + text);
    guard.counter = std::stoi(s.substr(pos, digits - pos)) - 1;
    if (guard.counter < 0 || guard.counter >= dimension) {
        throw ParseError("counter index out of range in script guard: " + text);
    }
    pos = digits;
    static const std::pair<const char*, ScriptedStrategy::Cmp> ops[] = {
        {"<=", ScriptedStrategy::Cmp::Le}, {">=", ScriptedStrategy::Cmp::Ge},
        {"==", ScriptedStrategy::Cmp::Eq}, {"!=", ScriptedStrategy::Cmp::Ne},
        {"<", ScriptedStrategy::Cmp::Lt},  {">", ScriptedStrategy::Cmp::Gt},
    };
    bool matched = false;
    for (const auto& [token, cmp] : ops) {
        const std::size_t len = std::char_traits<char>::length(token);
        if (s.compare(pos, len, token) == 0) {
            guard.cmp = cmp;
            pos += len;
            matched = true;
            break;
        }
    }
    if (!matched) throw ParseError("missing comparison in script guard: " + text);
    try {
        guard.value = std::stoll(s.substr(pos));
    } catch (const std::exception&) {
        throw ParseError("missing integer in script guard: " + text);
    }
    guard.always = false;
    return guard;
}

}  // namespace

ScriptedStrategy parse_script(const Model& model, const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("script syntax error: ") + e.what());
    }
    ScriptedStrategy script;
    try {
        for (const auto& r : doc.at("rules")) {
            ScriptedStrategy::Rule rule;
            rule.state = model.state_index(r.at("state").get<std::string>());
            if (r.contains("when")) {
                rule.guard = parse_guard(r.at("when").get<std::string>(), model.dimension());
            }
            auto outgoing = model.outgoing(rule.state);
            if (r.contains("index")) {
                int index = r.at("index").get<int>();
                if (index < 0 || index >= static_cast<int>(outgoing.size())) {
                    throw ParseError("script rule index out of range for state " +
                                     model.state(rule.state).id);
                }
                rule.transition = outgoing[index];
            } else {
                int target = model.state_index(r.at("to").get<std::string>());
                int found = -1;
                for (int t : outgoing) {
                    if (model.transition(t).target == target) {
                        found = t;
                        break;
                    }
                }
                if (found < 0) {
                    throw ParseError("no transition " + model.state(rule.state).id + " -> " +
                                     model.state(target).id);
                }
                rule.transition = found;
            }
            script.rules.push_back(rule);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("script structure error: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw ParseError(std::string("script references unknown state: ") + e.what());
    }
    return script;
}

int ScriptedRunStrategy::choose(int state, std::span<const std::int64_t> counters, Rng&) {
    for (const auto& rule : script_.rules) {
        if (rule.state == state && rule.guard.holds(counters)) {
            return rule.transition;
        }
    }
    throw SimulationError("script is not total: no rule fires at state " +
                          model_->state(state).id);
}

StrategyFactory script_factory(const Model& model, ScriptedStrategy script,
                               const StartSpec& start) {
    auto shared = std::make_shared<ScriptedStrategy>(std::move(script));
    return [&model, shared, start](std::int64_t n) {
        GrowthExpr identity;
        identity.power = 1.0;
        TrialPlan plan;
        plan.start = start.resolve(model, n, 0, std::nullopt, identity);
        plan.make = [&model, shared]() {
            return std::make_unique<ScriptedRunStrategy>(model, *shared);
        };
        return plan;
    };
}

}  // namespace pvass
