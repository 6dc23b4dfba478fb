#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pvass/model.hpp"

namespace pvass {

struct NotAlmostSurelyReachable : std::runtime_error {
    explicit NotAlmostSurelyReachable(const std::string& state)
        : std::runtime_error("state " + state + " cannot reach the target almost surely"),
          state_id(state) {}
    std::string state_id;
};

// Strongly connected components of the transition graph, in deterministic
// order (sorted by smallest member state). component_of[s] indexes into
// components.
struct SccResult {
    std::vector<std::vector<int>> components;
    std::vector<int> component_of;
};

SccResult scc_of_adjacency(const std::vector<std::vector<int>>& adjacency);
SccResult strongly_connected_components(const Model& model);
bool is_strongly_connected(const Model& model);

// Maximal end components plus the derived structure data. mec_graph holds an
// edge (i, j) when MEC j is reachable from MEC i, i != j; self_reentrant
// lists MECs that can be left and entered again.
struct MecDecomposition {
    std::vector<std::vector<int>> mecs;           // each sorted by state index
    std::vector<int> transient;                   // sorted
    std::vector<std::pair<int, int>> mec_graph;   // lexicographically sorted
    std::vector<int> self_reentrant;              // sorted
    std::vector<int> mec_of;                      // -1 for transient states

    bool has_edge(int from, int to) const;
};

MecDecomposition mec_decomposition(const Model& model);

// Restriction of the model to one MEC. Keeps original ids; state_map[i] is
// the original index of sub-state i.
struct InducedSubModel {
    Model model;
    std::vector<int> state_map;
    std::vector<int> transition_map;  // sub transition -> original transition
};

InducedSubModel induced_sub_model(const Model& model, const std::vector<int>& mec_states);

enum class StructureTag { StronglyConnected, DagLike, General };

struct StructureClass {
    StructureTag tag = StructureTag::General;
    std::vector<int> bottom;  // MEC indices without outgoing mec_graph edges
    // For General models, a witness cycle of MEC indices: either a mutually
    // reachable pair or a single re-entrant MEC.
    std::vector<int> cycle_witness;
};

StructureClass classify_structure(const Model& model, const MecDecomposition& decomp);

const char* structure_tag_name(StructureTag tag);

// Memoryless deterministic strategy reaching `target` with probability one
// from every state, minimizing the expected number of steps. Choices are
// exact optima with declaration-order tie-breaking; expected_steps and
// expected_change solve the first-step equations in rational arithmetic.
struct ReachStrategy {
    int target = 0;
    std::vector<int> choice;  // per state: transition index (-1 for probabilistic states)
    std::vector<Rational> expected_steps;
    std::vector<std::vector<Rational>> expected_change;  // per state, length d
};

ReachStrategy reach_strategy(const Model& model, int target);

}  // namespace pvass
