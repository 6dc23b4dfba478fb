#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pvass/decide.hpp"
#include "pvass/model.hpp"
#include "pvass/scheme.hpp"
#include "pvass/simulate.hpp"

namespace pvass {

// Almost-sure reachability choices without hitting-time optimization: hop
// greedy inside the winning region. Cheap fallback used to funnel runs into
// a frequency strategy's support.
struct PartialReach {
    std::vector<bool> winning;
    std::vector<int> choice;  // -1 outside the winning region / on probabilistic states
};

PartialReach partial_reach_choices(const Model& model, int target);

// History-dependent strategy realizing the scheme: item strategies for fixed
// step counts, switch strategies between segments, recorded re-entry states,
// and the first item's strategy forever once the scheme is exhausted.
class SchemeRunStrategy : public RunStrategy {
public:
    explicit SchemeRunStrategy(std::shared_ptr<const SchemePlan> plan);

    int choose(int state, std::span<const std::int64_t> counters, Rng& rng) override;
    void observe(const Transition& transition, int new_state) override;
    bool in_scheme() const override { return mode_ != Mode::Done; }
    std::optional<std::int64_t> sim_len() const override { return sim_len_; }

    // Exposed for segment accounting tests: sigma steps per completed
    // segment, in completion order.
    const std::vector<std::int64_t>& completed_segment_lengths() const {
        return completed_segments_;
    }
    // Compensated per-item and switch-path minima (units of raw updates for
    // switches; increment-compensated rationals for items).
    std::vector<std::vector<Rational>> ipath_minima() const;
    const std::vector<std::int64_t>& spath_minima() const { return spath_min_; }

private:
    enum class Mode { Simulate, Switch, Done };
    void begin_switch(int current_state);
    void advance_segment();

    std::shared_ptr<const SchemePlan> plan_;
    Mode mode_ = Mode::Simulate;
    int segment_ = 0;
    std::int64_t steps_in_segment_ = 0;
    std::int64_t cycle_ = 0;
    int switch_target_ = -1;
    std::vector<int> recorded_end_;
    std::int64_t sim_len_ = 0;
    std::vector<std::int64_t> completed_segments_;

    // Ipath accumulators scaled by the common increment denominator so they
    // stay in integer arithmetic.
    mpz_class ipath_denominator_ = 1;
    std::vector<std::vector<mpz_class>> ipath_scaled_increment_;  // per item per counter
    std::vector<std::vector<mpz_class>> ipath_sum_, ipath_min_;
    std::vector<std::int64_t> spath_sum_, spath_min_;
};

// Randomized memoryless strategy sampling transitions proportionally to a
// stationary flow; states without outflow follow reach choices toward the
// flow's support.
class FrequencyRunStrategy : public RunStrategy {
public:
    struct Table {
        struct Row {
            bool randomized = false;
            std::vector<std::uint64_t> thresholds;
            std::vector<int> transitions;
            int fallback = -1;
        };
        std::vector<Row> rows;
    };

    explicit FrequencyRunStrategy(std::shared_ptr<const Table> table) : table_(std::move(table)) {}
    int choose(int state, std::span<const std::int64_t> counters, Rng& rng) override;

private:
    std::shared_ptr<const Table> table_;
};

std::shared_ptr<FrequencyRunStrategy::Table> make_frequency_table(
    const Model& model, const std::vector<Rational>& flow);

// Factories for the named CLI strategies. Factories borrow the model: keep
// it alive for as long as the factory and its strategies run. The optional
// start override maps a grid value n to a configuration ("auto" state means
// the factory default).
struct StartSpec {
    std::optional<std::string> state;  // state id, or empty for the default
    std::vector<GrowthExpr> counters;  // empty: every counter set to n

    Config resolve(const Model& model, std::int64_t n, int default_state,
                   std::optional<std::int64_t> cycle_count,
                   const GrowthExpr& default_counter) const;
};

StrategyFactory md_strategy_factory(const Model& model, std::vector<int> choice,
                                    const StartSpec& start);

// Flow maximizing the minimal counter drift; the demon's stationary optimum.
StrategyFactory demonic_opt_factory(const Model& model, const StartSpec& start);

// Reaches the best reachable bottom MEC and plays the flow minimizing the
// drift of its best counter projection.
StrategyFactory angelic_opt_factory(const Model& model, const StartSpec& start);

// Scheme strategy for the model's nonnegative combination; start defaults to
// the first anchor with counters 8*n.
StrategyFactory scheme_factory(const Model& model, const StartSpec& start,
                               std::uint64_t cap = kDefaultStrategyCap);

}  // namespace pvass
