#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pvass/model.hpp"

namespace pvass {

struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Memoryless deterministic strategy: one fixed outgoing transition per
// nondeterministic state (global transition index; -1 on probabilistic
// states).
struct MdStrategy {
    std::vector<int> choice;
};

// Expected counter change per transition inside one BSCC of the chain
// induced by an MD strategy, weighted by the exact stationary distribution.
struct Increment {
    std::vector<Rational> value;
    MdStrategy strategy;
    std::vector<int> bscc;             // state indices, sorted
    std::vector<Rational> stationary;  // exact distribution, aligned with bscc
};

inline constexpr std::uint64_t kDefaultStrategyCap = 1000000;

// Number of MD strategies (product of nondeterministic out-degrees).
std::uint64_t md_strategy_count(const Model& model);

// All MD strategies in lexicographic order of choices (states in declaration
// order, transitions in declaration order). Throws ResourceLimit when the
// count exceeds `cap`.
std::vector<MdStrategy> enumerate_md_strategies(const Model& model,
                                                std::uint64_t cap = kDefaultStrategyCap);

// BSCCs of the induced chain with their exact stationary distributions and
// increments, ordered by smallest state index.
std::vector<Increment> bscc_increments(const Model& model, const MdStrategy& strategy);

// Deduplicated increments over all MD strategies and BSCCs, keeping the
// first witnessing (strategy, BSCC) for each distinct value, in enumeration
// order.
std::vector<Increment> all_increments(const Model& model,
                                      std::uint64_t cap = kDefaultStrategyCap);

std::vector<std::vector<Rational>> increment_values(const std::vector<Increment>& increments);

// Positive normal separating all increments from the nonnegative orthant:
// w with w(i) >= 1 and i_j . w <= -1 for every increment, found by a
// feasibility LP over the explicit set; nullopt when none exists.
std::optional<std::vector<Rational>> separating_normal_bruteforce(
    const std::vector<std::vector<Rational>>& increments, int dimension);

}  // namespace pvass
