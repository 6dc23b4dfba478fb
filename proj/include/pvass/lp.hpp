#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pvass/rational.hpp"

namespace pvass {

// Exact rational linear program. Variables without a lower bound are free;
// bounded variables satisfy x >= lower.
struct LinearProgram {
    enum class Relation { LessEq, GreaterEq, Equal };
    enum class Direction { Minimize, Maximize };

    struct Variable {
        std::string name;
        std::optional<Rational> lower;
    };
    struct Constraint {
        std::vector<Rational> coeffs;
        Relation rel = Relation::LessEq;
        Rational rhs;
    };

    std::vector<Variable> variables;
    std::vector<Constraint> constraints;
    // Empty objective means a pure feasibility problem.
    std::optional<std::vector<Rational>> objective;
    Direction direction = Direction::Minimize;

    int add_variable(std::string name, std::optional<Rational> lower = std::nullopt) {
        variables.push_back(Variable{std::move(name), std::move(lower)});
        return static_cast<int>(variables.size()) - 1;
    }
    void add_constraint(std::vector<Rational> coeffs, Relation rel, Rational rhs) {
        constraints.push_back(Constraint{std::move(coeffs), rel, std::move(rhs)});
    }
};

struct LpOutcome {
    enum class Status { Optimal, Feasible, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    Rational value;                      // objective value for Optimal
    std::vector<Rational> assignment;    // per variable, for Optimal/Feasible

    bool solved() const { return status == Status::Optimal || status == Status::Feasible; }
};

// Two-phase simplex with Bland's rule over exact rationals. Deterministic:
// identical programs produce identical outcomes.
LpOutcome solve_lp(const LinearProgram& lp);

}  // namespace pvass
