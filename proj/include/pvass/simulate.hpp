#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pvass/model.hpp"
#include "pvass/rng.hpp"
#include "pvass/scheme.hpp"

namespace pvass {

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precomputed sampling tables: probabilistic branches are drawn by comparing
// one 64-bit draw against floor(cumulative probability * 2^64), so sampling
// is exact to one part in 2^64 and identical across runs and platforms.
class ModelRuntime {
public:
    explicit ModelRuntime(const Model& model);

    const Model& model() const { return *model_; }
    int sample(int state, Rng& rng) const;

private:
    const Model* model_;
    struct ProbRow {
        std::vector<std::uint64_t> thresholds;  // size k-1; last branch implicit
        std::vector<int> transitions;           // size k
    };
    std::vector<ProbRow> rows_;
};

// One strategy instance drives exactly one trajectory: choose() resolves
// nondeterministic states, observe() sees every executed transition.
class RunStrategy {
public:
    virtual ~RunStrategy() = default;
    virtual int choose(int state, std::span<const std::int64_t> counters, Rng& rng) = 0;
    virtual void observe(const Transition& transition, int new_state) { (void)transition; (void)new_state; }
    // Scheme strategies report the steps consumed by the scheme portion.
    virtual bool in_scheme() const { return false; }
    virtual std::optional<std::int64_t> sim_len() const { return std::nullopt; }
};

class MdRunStrategy : public RunStrategy {
public:
    explicit MdRunStrategy(std::vector<int> choice) : choice_(std::move(choice)) {}
    int choose(int state, std::span<const std::int64_t>, Rng&) override {
        int t = choice_[state];
        if (t < 0) throw SimulationError("strategy has no choice for a nondeterministic state");
        return t;
    }

private:
    std::vector<int> choice_;
};

struct RunTrace {
    Config initial;
    struct Step {
        int transition;
        std::vector<std::int64_t> counters;
    };
    std::vector<Step> steps;
    std::optional<std::int64_t> term;  // empty when censored at the horizon
    std::int64_t horizon = 0;
    std::optional<std::int64_t> sim_len;
    std::vector<std::int64_t> min_prefix;  // componentwise minimum of running update sums
};

// Exact replay semantics: identical (model, strategy, start, horizon, seed)
// inputs produce identical traces. The trace stores every step.
RunTrace run_once(const Model& model, RunStrategy& strategy, const Config& start,
                  std::int64_t horizon, std::uint64_t seed);

// Threshold expressions in the grid variable n: a constant, c*n, n^p, c*n^p,
// or L2 (the squared cycle count of the scheme built for n).
struct GrowthExpr {
    double coefficient = 1.0;
    double power = 0.0;
    bool l_squared = false;

    static GrowthExpr parse(const std::string& text);
    std::int64_t eval(std::int64_t n, std::optional<std::int64_t> cycle_count) const;
    std::string to_string() const;
};

struct SafetyEvent {
    enum class Kind { TermAtLeast, MSafeUntilSimLen };
    Kind kind = Kind::TermAtLeast;
    GrowthExpr threshold;

    static SafetyEvent parse(const std::string& spec);
    std::string to_string() const;
};

// Per-n plan produced by a strategy factory: the start configuration, a
// maker for per-trial strategy instances, and scheme metadata when present.
struct TrialPlan {
    Config start;
    std::function<std::unique_ptr<RunStrategy>()> make;
    std::optional<std::int64_t> scheme_cycles;  // L(n) when the strategy is a scheme
};

using StrategyFactory = std::function<TrialPlan(std::int64_t n)>;
using HorizonFn = std::function<std::int64_t(std::int64_t n)>;

inline HorizonFn default_horizon() {
    return [](std::int64_t n) { return 64 * n * n; };
}

struct SimStats {
    std::uint64_t seed = 0;
    struct Row {
        std::int64_t n = 0;
        std::int64_t trials = 0;
        std::int64_t horizon = 0;
        std::int64_t sum_term = 0;           // sums of min(term, horizon), exact
        unsigned __int128 sum_term_sq = 0;
        double mean = 0;
        double stderr_mean = 0;
        std::int64_t q50 = 0, q90 = 0, q99 = 0;
        std::int64_t censored = 0;
        std::int64_t event_count = 0;
        std::optional<double> event_freq, event_ci_low, event_ci_high;
    };
    std::vector<Row> rows;
};

// Monte-Carlo estimation over a grid of n with independent substreams per
// (seed, n, trial). Deterministic for fixed inputs regardless of job count.
SimStats estimate_statistics(const Model& model, const StrategyFactory& factory,
                             const std::vector<std::int64_t>& n_grid, std::int64_t trials,
                             const HorizonFn& horizon_fn, std::uint64_t seed,
                             const std::optional<SafetyEvent>& event = std::nullopt,
                             int jobs = 1);

struct EventReport {
    struct Row {
        std::int64_t n = 0;
        double freq = 0;
        double ci_low = 0, ci_high = 0;
    };
    std::vector<Row> rows;
    bool nondecreasing_within_ci = true;
};

EventReport estimate_event(const Model& model, const StrategyFactory& factory,
                           const std::vector<std::int64_t>& n_grid, const SafetyEvent& event,
                           std::int64_t trials, const HorizonFn& horizon_fn, std::uint64_t seed,
                           int jobs = 1);

// Least-squares slope of log(mean) against log(n). Requires >= 3 points with
// positive coordinates.
double fit_exponent(const std::vector<std::pair<double, double>>& points);

struct WilsonInterval {
    double low = 0, high = 0;
};
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials);

}  // namespace pvass
