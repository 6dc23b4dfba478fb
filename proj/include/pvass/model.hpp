#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pvass/rational.hpp"

namespace pvass {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StateKind { Nondeterministic, Probabilistic };

struct State {
    std::string id;
    StateKind kind;
};

struct Transition {
    int source = 0;
    int target = 0;
    std::vector<std::int64_t> update;
    // Present exactly when the source state is probabilistic.
    std::optional<Rational> prob;
};

// A configuration: control state plus integer counter vector. Terminal once
// some counter is negative.
struct Config {
    int state = 0;
    std::vector<std::int64_t> counters;

    bool terminal() const {
        for (auto c : counters) {
            if (c < 0) return true;
        }
        return false;
    }
};

// A d-dimensional VASS MDP: states split into nondeterministic and
// probabilistic, transitions labeled with integer update vectors, and exact
// rational branch probabilities on probabilistic states. Immutable after
// construction; indices follow declaration order.
class Model {
public:
    Model(int dimension, std::vector<State> states, std::vector<Transition> transitions);

    struct SymbolicTransition {
        std::string from;
        std::vector<std::int64_t> update;
        std::string to;
        std::optional<Rational> prob;
    };
    // Convenience builder resolving state ids; throws ParseError on unknown
    // or duplicate ids. Does not validate semantic invariants.
    static Model from_parts(int dimension, std::vector<State> states,
                            std::vector<SymbolicTransition> transitions);

    int dimension() const { return dimension_; }
    int state_count() const { return static_cast<int>(states_.size()); }
    const std::vector<State>& states() const { return states_; }
    const State& state(int i) const { return states_.at(i); }
    const std::vector<Transition>& transitions() const { return transitions_; }
    const Transition& transition(int i) const { return transitions_.at(i); }
    std::span<const int> outgoing(int state) const { return outgoing_.at(state); }
    int state_index(const std::string& id) const;
    bool has_state(const std::string& id) const { return index_.count(id) > 0; }
    bool probabilistic(int state) const { return states_[state].kind == StateKind::Probabilistic; }

    std::vector<int> nondeterministic_states() const;

    // New model with the same graph where each update vector is replaced by
    // its single component at counter (0-based). Throws std::out_of_range.
    Model project_counter(int counter) const;

    // Smallest probability appearing on any probabilistic transition; 1 when
    // the model has none.
    Rational min_probability() const;

    // Smallest update entry over all transitions and counters.
    std::int64_t min_update() const;

private:
    int dimension_;
    std::vector<State> states_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<int>> outgoing_;
    std::unordered_map<std::string, int> index_;
};

// Same shape as Model but with a single rational weight per transition; the
// carrier for mean-payoff analysis of weighted models.
struct ScalarModel {
    std::vector<State> states;
    struct Edge {
        int source = 0;
        int target = 0;
        Rational weight;
        std::optional<Rational> prob;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> outgoing;

    bool probabilistic(int state) const { return states[state].kind == StateKind::Probabilistic; }
};

// Replaces each update vector u by the scalar u . w. Throws
// std::invalid_argument if w's length differs from the model dimension.
ScalarModel weight_by(const Model& model, const std::vector<Rational>& w);

// Treats a 1-dimensional model's integer labels as rational weights.
ScalarModel as_scalar(const Model& one_dim_model);

// Semantic invariant check; empty result means the model is well-formed.
// Each violation names the offending state or transition.
std::vector<std::string> validate(const Model& model);

// Parses the canonical model file format and validates. Throws ParseError
// (with position or context annotation) or ValidationError.
Model parse_model(const std::string& text);

// Canonical encoding: stable key order and field layout; parse(serialize(m))
// is the identity up to transition enumeration inside each state.
std::string serialize_model(const Model& model);

}  // namespace pvass
