#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pvass/graph.hpp"
#include "pvass/model.hpp"
#include "pvass/oracle.hpp"

namespace pvass {

// Subset of increments with positive integer coefficients whose weighted sum
// is componentwise nonnegative; the seed of the quadratic lower bound.
struct NonnegCombination {
    struct Item {
        Increment increment;
        long long coefficient = 1;
    };
    std::vector<Item> items;

    std::vector<Rational> weighted_sum(int dimension) const;
};

// Solves the feasibility program {a >= 0, sum a = 1, sum a * j >= 0} over the
// given increments, drops zero coefficients and scales to integers. Returns
// nullopt exactly when a separating positive normal exists.
std::optional<NonnegCombination> nonneg_combination(const std::vector<Increment>& increments,
                                                    int dimension);

// Constants of the lower-bound construction. xi is the tightest lower bound
// on the expected accumulated counter change incurred by any switch
// (minimum over source states, reachable switch targets and counters);
// lambda bounds the expected switch length via the geometric-trials
// argument. cycle_divisor is the L(n) divisor, clamped to >= 1.
struct SchemeConstants {
    Rational xi;
    std::int64_t min_update = 0;
    Rational x_min;
    Rational lambda;
    std::int64_t cycle_divisor = 1;

    std::int64_t cycle_count(std::int64_t n) const { return n / cycle_divisor; }
};

// Anchor state per combination item: the lexicographically smallest id in
// its BSCC.
std::vector<int> anchor_states(const Model& model, const NonnegCombination& combo);

SchemeConstants scheme_constants(const Model& model, const NonnegCombination& combo);

// Plan of L(n) identical n-cycles; segment i repeats increment i exactly
// L(n) * a_i times and ends with a switch.
struct Scheme {
    std::int64_t n = 0;
    std::int64_t cycles = 0;  // L(n)
    struct Segment {
        int item = 0;
        std::int64_t steps = 0;  // L(n) * a_i
    };
    std::vector<Segment> segments;  // one n-cycle

    std::int64_t increment_steps() const;
    std::int64_t switch_count() const;
};

// Throws std::invalid_argument when n < cycle_divisor (so L(n) = 0).
Scheme build_scheme(const NonnegCombination& combo, const SchemeConstants& consts,
                    std::int64_t n);

// Rational trajectory of the scheme executed symbolically from `start`, with
// every switch replaced by the constant vector (xi, ..., xi). Returns the
// componentwise minimum over all prefix points.
std::vector<Rational> scheme_trajectory_minimum(const NonnegCombination& combo,
                                                const SchemeConstants& consts,
                                                const Scheme& scheme,
                                                const std::vector<Rational>& start);

// Shared immutable data for executing the scheme strategy: per-item choice
// tables and anchors plus a reach strategy for every possible switch target.
struct SchemePlan {
    Scheme scheme;
    NonnegCombination combo;
    SchemeConstants consts;
    std::vector<int> anchors;                      // per item
    std::vector<std::optional<ReachStrategy>> reach;  // per state, for switch targets
    int start_state = 0;                           // anchor of item 1
};

SchemePlan make_scheme_plan(const Model& model, const NonnegCombination& combo,
                            const SchemeConstants& consts, std::int64_t n);

}  // namespace pvass
