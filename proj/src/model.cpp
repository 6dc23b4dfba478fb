#include "pvass/model.hpp"

#include <algorithm>

#include <json.hpp>

namespace pvass {

Model::Model(int dimension, std::vector<State> states, std::vector<Transition> transitions)
    : dimension_(dimension), states_(std::move(states)), transitions_(std::move(transitions)) {
    if (dimension_ <= 0) {
        throw ParseError("dimension must be a positive integer");
    }
    outgoing_.resize(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
        auto [it, inserted] = index_.emplace(states_[i].id, static_cast<int>(i));
        if (!inserted) {
            throw ParseError("duplicate state id: " + states_[i].id);
        }
    }
    for (std::size_t t = 0; t < transitions_.size(); ++t) {
        const auto& tr = transitions_[t];
        if (tr.source < 0 || tr.source >= state_count() || tr.target < 0 ||
            tr.target >= state_count()) {
            throw ParseError("transition references unknown state index");
        }
        outgoing_[tr.source].push_back(static_cast<int>(t));
    }
}

Model Model::from_parts(int dimension, std::vector<State> states,
                        std::vector<SymbolicTransition> transitions) {
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < states.size(); ++i) {
        auto [it, inserted] = index.emplace(states[i].id, static_cast<int>(i));
        if (!inserted) {
            throw ParseError("duplicate state id: " + states[i].id);
        }
    }
    std::vector<Transition> resolved;
    resolved.reserve(transitions.size());
    for (auto& st : transitions) {
        auto from = index.find(st.from);
        auto to = index.find(st.to);
        if (from == index.end()) throw ParseError("unknown state id: " + st.from);
        if (to == index.end()) throw ParseError("unknown state id: " + st.to);
        resolved.push_back(Transition{from->second, to->second, std::move(st.update), std::move(st.prob)});
    }
    return Model(dimension, std::move(states), std::move(resolved));
}

int Model::state_index(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw std::out_of_range("unknown state id: " + id);
    }
    return it->second;
}

std::vector<int> Model::nondeterministic_states() const {
    std::vector<int> result;
    for (int i = 0; i < state_count(); ++i) {
        if (!probabilistic(i)) result.push_back(i);
    }
    return result;
}

Model Model::project_counter(int counter) const {
    if (counter < 0 || counter >= dimension_) {
        throw std::out_of_range("counter index out of range");
    }
    std::vector<Transition> projected = transitions_;
    for (auto& t : projected) {
        t.update = {t.update[counter]};
    }
    return Model(1, states_, std::move(projected));
}

Rational Model::min_probability() const {
    Rational best = 1;
    for (const auto& t : transitions_) {
        if (t.prob && *t.prob < best) best = *t.prob;
    }
    return best;
}

std::int64_t Model::min_update() const {
    std::int64_t best = 0;
    bool first = true;
    for (const auto& t : transitions_) {
        for (auto u : t.update) {
            if (first || u < best) {
                best = u;
                first = false;
            }
        }
    }
    return best;
}

ScalarModel weight_by(const Model& model, const std::vector<Rational>& w) {
    if (static_cast<int>(w.size()) != model.dimension()) {
        throw std::invalid_argument("weight vector length does not match model dimension");
    }
    ScalarModel result;
    result.states = model.states();
    result.outgoing.resize(model.state_count());
    for (const auto& t : model.transitions()) {
        Rational weight = 0;
        for (int j = 0; j < model.dimension(); ++j) {
            weight += w[j] * Rational(static_cast<long>(t.update[j]));
        }
        result.outgoing[t.source].push_back(static_cast<int>(result.edges.size()));
        result.edges.push_back(ScalarModel::Edge{t.source, t.target, weight, t.prob});
    }
    return result;
}

ScalarModel as_scalar(const Model& one_dim_model) {
    if (one_dim_model.dimension() != 1) {
        throw std::invalid_argument("as_scalar expects a 1-dimensional model");
    }
    return weight_by(one_dim_model, {Rational(1)});
}

std::vector<std::string> validate(const Model& model) {
    std::vector<std::string> violations;
    for (int s = 0; s < model.state_count(); ++s) {
        if (model.outgoing(s).empty()) {
            violations.push_back("state " + model.state(s).id + " has no outgoing transition");
            continue;
        }
        if (model.probabilistic(s)) {
            Rational sum = 0;
            bool complete = true;
            for (int t : model.outgoing(s)) {
                const auto& tr = model.transition(t);
                if (!tr.prob) {
                    violations.push_back("missing probability on transition from probabilistic state " +
                                         model.state(s).id);
                    complete = false;
                    continue;
                }
                if (*tr.prob <= 0) {
                    violations.push_back("non-positive probability on transition from state " +
                                         model.state(s).id);
                    complete = false;
                    continue;
                }
                sum += *tr.prob;
            }
            if (complete && sum != 1) {
                violations.push_back("probabilities sum != 1 at state " + model.state(s).id);
            }
        } else {
            for (int t : model.outgoing(s)) {
                if (model.transition(t).prob) {
                    violations.push_back("probability on nondeterministic transition from state " +
                                         model.state(s).id);
                }
            }
        }
    }
    for (std::size_t t = 0; t < model.transitions().size(); ++t) {
        if (static_cast<int>(model.transition(static_cast<int>(t)).update.size()) !=
            model.dimension()) {
            violations.push_back("update vector length != dimension on transition " +
                                 std::to_string(t));
        }
    }
    return violations;
}

namespace {

using ordered_json = nlohmann::ordered_json;

StateKind parse_kind(const std::string& kind, const std::string& id) {
    if (kind == "n") return StateKind::Nondeterministic;
    if (kind == "p") return StateKind::Probabilistic;
    throw ParseError("state " + id + ": kind must be \"n\" or \"p\", got \"" + kind + "\"");
}

}  // namespace

Model parse_model(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model syntax error: ") + e.what());
    }
    try {
        int dimension = doc.at("dimension").get<int>();
        std::vector<State> states;
        for (const auto& s : doc.at("states")) {
            std::string id = s.at("id").get<std::string>();
            states.push_back(State{id, parse_kind(s.at("kind").get<std::string>(), id)});
        }
        std::vector<Model::SymbolicTransition> transitions;
        for (const auto& t : doc.at("transitions")) {
            Model::SymbolicTransition st;
            st.from = t.at("from").get<std::string>();
            st.to = t.at("to").get<std::string>();
            for (const auto& u : t.at("update")) {
                st.update.push_back(u.get<std::int64_t>());
            }
            if (t.contains("prob")) {
                Rational p = parse_rational(t.at("prob").get<std::string>());
                st.prob = p;
            }
            transitions.push_back(std::move(st));
        }
        Model model = Model::from_parts(dimension, std::move(states), std::move(transitions));
        auto violations = validate(model);
        if (!violations.empty()) {
            std::string message = "invalid model:";
            for (const auto& v : violations) message += "\n  " + v;
            throw ValidationError(message);
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model structure error: ") + e.what());
    }
}

std::string serialize_model(const Model& model) {
    ordered_json doc;
    doc["dimension"] = model.dimension();
    doc["states"] = ordered_json::array();
    for (const auto& s : model.states()) {
        ordered_json js;
        js["id"] = s.id;
        js["kind"] = s.kind == StateKind::Probabilistic ? "p" : "n";
        doc["states"].push_back(js);
    }
    doc["transitions"] = ordered_json::array();
    for (const auto& t : model.transitions()) {
        ordered_json jt;
        jt["from"] = model.state(t.source).id;
        jt["update"] = t.update;
        jt["to"] = model.state(t.target).id;
        if (t.prob) {
            jt["prob"] = rational_to_string(*t.prob);
        }
        doc["transitions"].push_back(jt);
    }
    return doc.dump(2) + "\n";
}

}  // namespace pvass
