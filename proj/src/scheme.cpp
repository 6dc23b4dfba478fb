#include "pvass/scheme.hpp"

#include <algorithm>

#include "pvass/lp.hpp"

namespace pvass {

std::vector<Rational> NonnegCombination::weighted_sum(int dimension) const {
    std::vector<Rational> sum(dimension, Rational(0));
    for (const auto& item : items) {
        for (int j = 0; j < dimension; ++j) {
            sum[j] += Rational(static_cast<long>(item.coefficient)) * item.increment.value[j];
        }
    }
    return sum;
}

std::optional<NonnegCombination> nonneg_combination(const std::vector<Increment>& increments,
                                                    int dimension) {
    if (increments.empty()) return std::nullopt;
    const int k = static_cast<int>(increments.size());
    LinearProgram lp;
    for (int i = 0; i < k; ++i) lp.add_variable("a" + std::to_string(i), Rational(0));
    std::vector<Rational> ones(k, Rational(1));
    lp.add_constraint(std::move(ones), LinearProgram::Relation::Equal, Rational(1));
    for (int j = 0; j < dimension; ++j) {
        std::vector<Rational> coeffs(k);
        for (int i = 0; i < k; ++i) coeffs[i] = increments[i].value[j];
        lp.add_constraint(std::move(coeffs), LinearProgram::Relation::GreaterEq, Rational(0));
    }
    LpOutcome outcome = solve_lp(lp);
    if (!outcome.solved()) return std::nullopt;

    // Scale the rational weights to coprime positive integers.
    mpz_class lcm = 1;
    for (const auto& a : outcome.assignment) {
        if (a > 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), a.get_den().get_mpz_t());
    }
    std::vector<mpz_class> scaled;
    NonnegCombination combo;
    for (int i = 0; i < k; ++i) {
        if (outcome.assignment[i] <= 0) continue;
        Rational v = outcome.assignment[i] * Rational(lcm);
        scaled.push_back(v.get_num());
    }
    mpz_class gcd = 0;
    for (const auto& v : scaled) mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), v.get_mpz_t());
    std::size_t next = 0;
    for (int i = 0; i < k; ++i) {
        if (outcome.assignment[i] <= 0) continue;
        mpz_class c = scaled[next++] / gcd;
        if (!c.fits_slong_p()) {
            throw std::overflow_error("combination coefficient out of range");
        }
        combo.items.push_back(NonnegCombination::Item{increments[i], c.get_si()});
    }
    return combo;
}

std::vector<int> anchor_states(const Model& model, const NonnegCombination& combo) {
    std::vector<int> anchors;
    anchors.reserve(combo.items.size());
    for (const auto& item : combo.items) {
        int best = item.increment.bscc.front();
        for (int s : item.increment.bscc) {
            if (model.state(s).id < model.state(best).id) best = s;
        }
        anchors.push_back(best);
    }
    return anchors;
}

SchemeConstants scheme_constants(const Model& model, const NonnegCombination& combo) {
    SchemeConstants consts;
    consts.min_update = model.min_update();
    consts.x_min = model.min_probability();

    // Possible switch targets: every state of every item's BSCC (switches aim
    // either at the next anchor or at a recorded segment end state).
    std::vector<bool> is_target(model.state_count(), false);
    for (const auto& item : combo.items) {
        for (int s : item.increment.bscc) is_target[s] = true;
    }
    bool first = true;
    for (int target = 0; target < model.state_count(); ++target) {
        if (!is_target[target]) continue;
        auto gamma = reach_strategy(model, target);
        for (int source = 0; source < model.state_count(); ++source) {
            for (const auto& component : gamma.expected_change[source]) {
                if (first || component < consts.xi) {
                    consts.xi = component;
                    first = false;
                }
            }
        }
    }
    if (first) consts.xi = 0;

    const int q = model.state_count();
    Rational denom_pow = 1;
    for (int i = 0; i + 1 < q; ++i) denom_pow *= consts.x_min;
    consts.lambda = Rational(static_cast<long>(q - 1)) / denom_pow;

    Rational ell(static_cast<long>(combo.items.size()));
    Rational coeff_sum = 0;
    for (const auto& item : combo.items) coeff_sum += Rational(static_cast<long>(item.coefficient));
    Rational divisor = ell * consts.xi - coeff_sum * Rational(static_cast<long>(consts.min_update)) +
                       Rational(1);
    consts.cycle_divisor = std::max<std::int64_t>(1, rational_ceil(divisor));
    return consts;
}

std::int64_t Scheme::increment_steps() const {
    std::int64_t per_cycle = 0;
    for (const auto& seg : segments) per_cycle += seg.steps;
    return per_cycle * cycles;
}

std::int64_t Scheme::switch_count() const {
    return static_cast<std::int64_t>(segments.size()) * cycles;
}

Scheme build_scheme(const NonnegCombination& combo, const SchemeConstants& consts,
                    std::int64_t n) {
    if (n < consts.cycle_divisor) {
        throw std::invalid_argument("n is below the cycle divisor; the scheme would be empty");
    }
    Scheme scheme;
    scheme.n = n;
    scheme.cycles = consts.cycle_count(n);
    for (std::size_t i = 0; i < combo.items.size(); ++i) {
        scheme.segments.push_back(
            Scheme::Segment{static_cast<int>(i), scheme.cycles * combo.items[i].coefficient});
    }
    return scheme;
}

std::vector<Rational> scheme_trajectory_minimum(const NonnegCombination& combo,
                                                const SchemeConstants& consts,
                                                const Scheme& scheme,
                                                const std::vector<Rational>& start) {
    std::vector<Rational> point = start;
    std::vector<Rational> minimum = start;
    auto note = [&]() {
        for (std::size_t j = 0; j < point.size(); ++j) {
            if (point[j] < minimum[j]) minimum[j] = point[j];
        }
    };
    for (std::int64_t cycle = 0; cycle < scheme.cycles; ++cycle) {
        for (const auto& seg : scheme.segments) {
            const auto& inc = combo.items[seg.item].increment.value;
            for (std::int64_t step = 0; step < seg.steps; ++step) {
                for (std::size_t j = 0; j < point.size(); ++j) point[j] += inc[j];
                note();
            }
            for (std::size_t j = 0; j < point.size(); ++j) point[j] += consts.xi;
            note();
        }
    }
    return minimum;
}

SchemePlan make_scheme_plan(const Model& model, const NonnegCombination& combo,
                            const SchemeConstants& consts, std::int64_t n) {
    SchemePlan plan;
    plan.scheme = build_scheme(combo, consts, n);
    plan.combo = combo;
    plan.consts = consts;
    plan.anchors = anchor_states(model, combo);
    plan.start_state = plan.anchors.front();
    plan.reach.resize(model.state_count());
    std::vector<bool> is_target(model.state_count(), false);
    for (const auto& item : combo.items) {
        for (int s : item.increment.bscc) is_target[s] = true;
    }
    for (int s = 0; s < model.state_count(); ++s) {
        if (is_target[s]) plan.reach[s] = reach_strategy(model, s);
    }
    return plan;
}

}  // namespace pvass
