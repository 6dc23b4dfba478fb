#include "pvass/strategies.hpp"

#include <algorithm>
#include <deque>

namespace pvass {

namespace {

// Greatest fixpoint of the controllable almost-sure reachability operator.
std::vector<bool> prob1e(const Model& model, int target) {
    const int n = model.state_count();
    std::vector<bool> s(n, true);
    for (;;) {
        std::vector<bool> r(n, false);
        r[target] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            for (int q = 0; q < n; ++q) {
                if (r[q] || !s[q]) continue;
                bool add = false;
                if (model.probabilistic(q)) {
                    bool stays = true, hits = false;
                    for (int t : model.outgoing(q)) {
                        int tgt = model.transition(t).target;
                        if (!s[tgt]) stays = false;
                        if (r[tgt]) hits = true;
                    }
                    add = stays && hits;
                } else {
                    for (int t : model.outgoing(q)) {
                        if (r[model.transition(t).target]) {
                            add = true;
                            break;
                        }
                    }
                }
                if (add) {
                    r[q] = true;
                    grew = true;
                }
            }
        }
        if (r == s) return s;
        s = std::move(r);
    }
}

std::uint64_t rational_threshold(const Rational& cumulative) {
    mpz_class scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), cumulative.get_num().get_mpz_t(), 64);
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), cumulative.get_den().get_mpz_t());
    if (mpz_sizeinbase(q.get_mpz_t(), 2) > 64) return UINT64_MAX;
    return static_cast<std::uint64_t>(q.get_ui());
}

}  // namespace

PartialReach partial_reach_choices(const Model& model, int target) {
    PartialReach result;
    result.winning = prob1e(model, target);
    const int n = model.state_count();
    result.choice.assign(n, -1);
    std::vector<int> dist(n, -1);
    dist[target] = 0;
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& t : model.transitions()) {
            if (!result.winning[t.source] || !result.winning[t.target]) continue;
            if (dist[t.target] >= 0 && dist[t.source] < 0) {
                dist[t.source] = dist[t.target] + 1;
                grew = true;
            }
        }
    }
    for (int s = 0; s < n; ++s) {
        if (model.probabilistic(s) || !result.winning[s]) continue;
        int best = -1;
        for (int t : model.outgoing(s)) {
            int tgt = model.transition(t).target;
            if (!result.winning[tgt] || dist[tgt] < 0) continue;
            if (best < 0 || dist[tgt] < dist[model.transition(best).target]) best = t;
        }
        result.choice[s] = best;
    }
    return result;
}

SchemeRunStrategy::SchemeRunStrategy(std::shared_ptr<const SchemePlan> plan)
    : plan_(std::move(plan)) {
    recorded_end_ = plan_->anchors;
    const std::size_t ell = plan_->combo.items.size();
    const int d = static_cast<int>(plan_->combo.items.front().increment.value.size());
    std::vector<Rational> all;
    for (const auto& item : plan_->combo.items) {
        for (const auto& v : item.increment.value) all.push_back(v);
    }
    ipath_denominator_ = common_denominator(all).get_num();
    ipath_scaled_increment_.resize(ell);
    ipath_sum_.assign(ell, std::vector<mpz_class>(d, 0));
    ipath_min_.assign(ell, std::vector<mpz_class>(d, 0));
    for (std::size_t i = 0; i < ell; ++i) {
        for (const auto& v : plan_->combo.items[i].increment.value) {
            ipath_scaled_increment_[i].push_back(v.get_num() *
                                                 (ipath_denominator_ / v.get_den()));
        }
    }
    spath_sum_.assign(d, 0);
    spath_min_.assign(d, 0);
}

int SchemeRunStrategy::choose(int state, std::span<const std::int64_t>, Rng&) {
    int item;
    switch (mode_) {
        case Mode::Simulate:
            item = plan_->scheme.segments[segment_].item;
            break;
        case Mode::Switch:
            return plan_->reach[switch_target_]->choice[state];
        case Mode::Done:
        default:
            item = plan_->scheme.segments.front().item;
            break;
    }
    int t = plan_->combo.items[item].increment.strategy.choice[state];
    if (t < 0) throw SimulationError("scheme item strategy has no choice at state");
    return t;
}

void SchemeRunStrategy::observe(const Transition& transition, int new_state) {
    if (mode_ == Mode::Done) return;
    ++sim_len_;
    const int d = static_cast<int>(transition.update.size());
    if (mode_ == Mode::Simulate) {
        auto& sums = ipath_sum_[segment_];
        auto& mins = ipath_min_[segment_];
        for (int j = 0; j < d; ++j) {
            sums[j] += ipath_denominator_ * transition.update[j] -
                       ipath_scaled_increment_[segment_][j];
            if (sums[j] < mins[j]) mins[j] = sums[j];
        }
        ++steps_in_segment_;
        if (steps_in_segment_ == plan_->scheme.segments[segment_].steps) {
            completed_segments_.push_back(steps_in_segment_);
            recorded_end_[segment_] = new_state;
            begin_switch(new_state);
        }
    } else {
        for (int j = 0; j < d; ++j) {
            spath_sum_[j] += transition.update[j];
            if (spath_sum_[j] < spath_min_[j]) spath_min_[j] = spath_sum_[j];
        }
        if (new_state == switch_target_) advance_segment();
    }
}

void SchemeRunStrategy::begin_switch(int current_state) {
    const int ell = static_cast<int>(plan_->scheme.segments.size());
    switch_target_ = recorded_end_[(segment_ + 1) % ell];
    mode_ = Mode::Switch;
    if (current_state == switch_target_) advance_segment();
}

void SchemeRunStrategy::advance_segment() {
    const int ell = static_cast<int>(plan_->scheme.segments.size());
    ++segment_;
    steps_in_segment_ = 0;
    if (segment_ == ell) {
        segment_ = 0;
        ++cycle_;
        if (cycle_ == plan_->scheme.cycles) {
            mode_ = Mode::Done;
            return;
        }
    }
    mode_ = Mode::Simulate;
}

std::vector<std::vector<Rational>> SchemeRunStrategy::ipath_minima() const {
    std::vector<std::vector<Rational>> result(ipath_min_.size());
    for (std::size_t i = 0; i < ipath_min_.size(); ++i) {
        for (const auto& v : ipath_min_[i]) {
            Rational r(v, ipath_denominator_);
            r.canonicalize();
            result[i].push_back(r);
        }
    }
    return result;
}

int FrequencyRunStrategy::choose(int state, std::span<const std::int64_t>, Rng& rng) {
    const auto& row = table_->rows[state];
    if (!row.randomized) {
        if (row.fallback < 0) {
            throw SimulationError("frequency strategy has no choice at state");
        }
        return row.fallback;
    }
    const std::uint64_t draw = rng.next_u64();
    for (std::size_t k = 0; k + 1 < row.transitions.size(); ++k) {
        if (draw < row.thresholds[k]) return row.transitions[k];
    }
    return row.transitions.back();
}

std::shared_ptr<FrequencyRunStrategy::Table> make_frequency_table(
    const Model& model, const std::vector<Rational>& flow) {
    auto table = std::make_shared<FrequencyRunStrategy::Table>();
    table->rows.resize(model.state_count());
    int support_anchor = -1;
    for (int s = 0; s < model.state_count(); ++s) {
        if (model.probabilistic(s)) continue;
        Rational outflow = 0;
        for (int t : model.outgoing(s)) outflow += flow[t];
        if (outflow > 0 && support_anchor < 0) support_anchor = s;
    }
    std::optional<PartialReach> fallback;
    if (support_anchor >= 0) fallback = partial_reach_choices(model, support_anchor);
    for (int s = 0; s < model.state_count(); ++s) {
        if (model.probabilistic(s)) continue;
        auto& row = table->rows[s];
        Rational outflow = 0;
        for (int t : model.outgoing(s)) outflow += flow[t];
        if (outflow > 0) {
            row.randomized = true;
            Rational cumulative = 0;
            for (int t : model.outgoing(s)) {
                if (flow[t] <= 0) continue;
                row.transitions.push_back(t);
            }
            for (std::size_t k = 0; k + 1 < row.transitions.size(); ++k) {
                cumulative += flow[row.transitions[k]] / outflow;
                row.thresholds.push_back(rational_threshold(cumulative));
            }
        } else if (fallback && fallback->choice[s] >= 0) {
            row.fallback = fallback->choice[s];
        } else {
            row.fallback = model.outgoing(s).front();
        }
    }
    return table;
}

Config StartSpec::resolve(const Model& model, std::int64_t n, int default_state,
                          std::optional<std::int64_t> cycle_count,
                          const GrowthExpr& default_counter) const {
    Config config;
    config.state = default_state;
    if (state && *state != "auto") {
        config.state = model.state_index(*state);
    }
    config.counters.resize(model.dimension());
    for (int j = 0; j < model.dimension(); ++j) {
        const GrowthExpr& expr =
            (static_cast<int>(counters.size()) > j) ? counters[j] : default_counter;
        config.counters[j] = expr.eval(n, cycle_count);
    }
    return config;
}

namespace {

GrowthExpr identity_expr() {
    GrowthExpr e;
    e.coefficient = 1.0;
    e.power = 1.0;
    return e;
}

}  // namespace

StrategyFactory md_strategy_factory(const Model& model, std::vector<int> choice,
                                    const StartSpec& start) {
    auto shared = std::make_shared<std::vector<int>>(std::move(choice));
    return [&model, shared, start](std::int64_t n) {
        TrialPlan plan;
        plan.start = start.resolve(model, n, 0, std::nullopt, identity_expr());
        plan.make = [shared]() { return std::make_unique<MdRunStrategy>(*shared); };
        return plan;
    };
}

StrategyFactory demonic_opt_factory(const Model& model, const StartSpec& start) {
    auto flow = demonic_optimal_flow(model);
    auto table = make_frequency_table(model, flow.frequency);
    // Prefer starting inside the flow's support.
    int default_state = 0;
    for (int s = 0; s < model.state_count(); ++s) {
        Rational outflow = 0;
        for (int t : model.outgoing(s)) outflow += flow.frequency[t];
        if (outflow > 0) {
            default_state = s;
            break;
        }
    }
    return [&model, table, start, default_state](std::int64_t n) {
        TrialPlan plan;
        plan.start = start.resolve(model, n, default_state, std::nullopt, identity_expr());
        plan.make = [table]() { return std::make_unique<FrequencyRunStrategy>(table); };
        return plan;
    };
}

StrategyFactory angelic_opt_factory(const Model& model, const StartSpec& start) {
    auto decomp = mec_decomposition(model);
    auto structure = classify_structure(model, decomp);

    // Best projection value per bottom MEC; pick the smallest.
    int best_mec = -1, best_counter = 0;
    std::optional<Rational> best_value;
    for (int m : structure.bottom) {
        auto sub = induced_sub_model(model, decomp.mecs[m]);
        for (int j = 0; j < model.dimension(); ++j) {
            auto solution = min_mean_payoff(as_scalar(sub.model.project_counter(j)));
            if (!best_value || solution.value < *best_value) {
                best_value = solution.value;
                best_mec = m;
                best_counter = j;
            }
        }
    }
    if (best_mec < 0) throw SimulationError("model has no bottom MEC");

    auto sub = induced_sub_model(model, decomp.mecs[best_mec]);
    auto flow = angelic_optimal_flow(sub.model, best_counter);
    std::vector<Rational> lifted(model.transitions().size(), Rational(0));
    for (std::size_t t = 0; t < sub.transition_map.size(); ++t) {
        lifted[sub.transition_map[t]] = flow.frequency[t];
    }
    auto table = make_frequency_table(model, lifted);
    // Funnel states outside the MEC toward it.
    const int anchor = decomp.mecs[best_mec].front();
    auto preamble = partial_reach_choices(model, anchor);
    for (int s = 0; s < model.state_count(); ++s) {
        if (model.probabilistic(s)) continue;
        if (decomp.mec_of[s] != best_mec && preamble.choice[s] >= 0 &&
            !table->rows[s].randomized) {
            table->rows[s].fallback = preamble.choice[s];
        }
    }
    return [&model, table, start, anchor, preamble](std::int64_t n) {
        TrialPlan plan;
        plan.start = start.resolve(model, n, 0, std::nullopt, identity_expr());
        if (!preamble.winning[plan.start.state]) {
            throw SimulationError("start state cannot reach the selected bottom MEC");
        }
        plan.make = [table]() { return std::make_unique<FrequencyRunStrategy>(table); };
        return plan;
    };
}

StrategyFactory scheme_factory(const Model& model, const StartSpec& start, std::uint64_t cap) {
    if (!is_strongly_connected(model)) {
        throw NotStronglyConnected("scheme strategies require a strongly connected model");
    }
    auto combo = nonneg_combination(all_increments(model, cap), model.dimension());
    if (!combo) {
        throw SimulationError(
            "model admits a ranking witness; no nonnegative combination exists to build a scheme");
    }
    auto consts = scheme_constants(model, *combo);
    GrowthExpr default_counter;
    default_counter.coefficient = 8.0;
    default_counter.power = 1.0;
    return [&model, combo = *combo, consts, start, default_counter](std::int64_t n) {
        auto plan_data = std::make_shared<SchemePlan>(make_scheme_plan(model, combo, consts, n));
        TrialPlan plan;
        plan.scheme_cycles = plan_data->scheme.cycles;
        plan.start = start.resolve(model, n, plan_data->start_state, plan.scheme_cycles,
                                   default_counter);
        plan.make = [plan_data]() { return std::make_unique<SchemeRunStrategy>(plan_data); };
        return plan;
    };
}

}  // namespace pvass
