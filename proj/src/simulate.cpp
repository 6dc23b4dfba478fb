#include "pvass/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace pvass {

namespace {

std::uint64_t cumulative_threshold(const Rational& cumulative) {
    // floor(cumulative * 2^64)
    mpz_class scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), cumulative.get_num().get_mpz_t(), 64);
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), cumulative.get_den().get_mpz_t());
    if (mpz_sizeinbase(q.get_mpz_t(), 2) > 64) return UINT64_MAX;
    return static_cast<std::uint64_t>(q.get_ui());
}

}  // namespace

ModelRuntime::ModelRuntime(const Model& model) : model_(&model) {
    rows_.resize(model.state_count());
    for (int s = 0; s < model.state_count(); ++s) {
        if (!model.probabilistic(s)) continue;
        auto& row = rows_[s];
        Rational cumulative = 0;
        auto outgoing = model.outgoing(s);
        for (std::size_t k = 0; k < outgoing.size(); ++k) {
            row.transitions.push_back(outgoing[k]);
            if (k + 1 < outgoing.size()) {
                cumulative += *model.transition(outgoing[k]).prob;
                row.thresholds.push_back(cumulative_threshold(cumulative));
            }
        }
    }
}

int ModelRuntime::sample(int state, Rng& rng) const {
    const auto& row = rows_[state];
    const std::uint64_t draw = rng.next_u64();
    for (std::size_t k = 0; k < row.thresholds.size(); ++k) {
        if (draw < row.thresholds[k]) return row.transitions[k];
    }
    return row.transitions.back();
}

namespace {

struct StreamOutcome {
    std::optional<std::int64_t> term;
    std::vector<std::int64_t> min_prefix;
    std::vector<std::int64_t> min_prefix_scheme;
    std::optional<std::int64_t> sim_len;
};

StreamOutcome run_stream(const ModelRuntime& runtime, RunStrategy& strategy, const Config& start,
                         std::int64_t horizon, Rng& rng, RunTrace* trace) {
    const Model& model = runtime.model();
    const int d = model.dimension();
    if (static_cast<int>(start.counters.size()) != d) {
        throw SimulationError("start configuration has wrong counter count");
    }
    StreamOutcome out;
    out.min_prefix.assign(d, 0);
    out.min_prefix_scheme.assign(d, 0);
    std::vector<std::int64_t> counters = start.counters;
    std::vector<std::int64_t> change(d, 0);
    int state = start.state;
    if (start.terminal()) {
        out.term = 0;
        out.sim_len = strategy.sim_len();
        return out;
    }
    for (std::int64_t step = 1; step <= horizon; ++step) {
        const bool scheme_step = strategy.in_scheme();
        int t;
        if (model.probabilistic(state)) {
            t = runtime.sample(state, rng);
        } else {
            t = strategy.choose(state, counters, rng);
        }
        const Transition& tr = model.transition(t);
        for (int j = 0; j < d; ++j) {
            counters[j] += tr.update[j];
            change[j] += tr.update[j];
            if (change[j] < out.min_prefix[j]) out.min_prefix[j] = change[j];
            if (scheme_step && change[j] < out.min_prefix_scheme[j]) {
                out.min_prefix_scheme[j] = change[j];
            }
        }
        state = tr.target;
        strategy.observe(tr, state);
        if (trace) trace->steps.push_back(RunTrace::Step{t, counters});
        bool terminal = false;
        for (int j = 0; j < d; ++j) {
            if (counters[j] < 0) {
                terminal = true;
                break;
            }
        }
        if (terminal) {
            out.term = step;
            break;
        }
    }
    out.sim_len = strategy.sim_len();
    return out;
}

}  // namespace

RunTrace run_once(const Model& model, RunStrategy& strategy, const Config& start,
                  std::int64_t horizon, std::uint64_t seed) {
    if (horizon < 1) throw SimulationError("horizon must be at least 1");
    ModelRuntime runtime(model);
    Rng rng = Rng::substream(seed, 0, 0);
    RunTrace trace;
    trace.initial = start;
    trace.horizon = horizon;
    auto outcome = run_stream(runtime, strategy, start, horizon, rng, &trace);
    trace.term = outcome.term;
    trace.sim_len = outcome.sim_len;
    trace.min_prefix = outcome.min_prefix;
    return trace;
}

GrowthExpr GrowthExpr::parse(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    if (s.empty()) throw SimulationError("empty growth expression");
    GrowthExpr expr;
    if (s == "L2" || s == "L^2") {
        expr.l_squared = true;
        return expr;
    }
    std::size_t pos = 0;
    auto parse_number = [&](double& out) {
        std::size_t consumed = 0;
        try {
            out = std::stod(s.substr(pos), &consumed);
        } catch (const std::exception&) {
            throw SimulationError("malformed growth expression: " + text);
        }
        pos += consumed;
    };
    if (s[pos] != 'n') {
        parse_number(expr.coefficient);
        if (pos < s.size() && s[pos] == '*') ++pos;
    }
    if (pos < s.size() && s[pos] == 'n') {
        ++pos;
        expr.power = 1.0;
        if (pos < s.size() && s[pos] == '^') {
            ++pos;
            parse_number(expr.power);
        }
    }
    if (pos != s.size()) throw SimulationError("malformed growth expression: " + text);
    return expr;
}

std::int64_t GrowthExpr::eval(std::int64_t n, std::optional<std::int64_t> cycle_count) const {
    if (l_squared) {
        if (!cycle_count) {
            throw SimulationError("L2 threshold requires a scheme strategy");
        }
        return *cycle_count * *cycle_count;
    }
    double value = coefficient * std::pow(static_cast<double>(n), power);
    return static_cast<std::int64_t>(std::ceil(value - 1e-9));
}

std::string GrowthExpr::to_string() const {
    if (l_squared) return "L2";
    std::string s;
    if (coefficient != 1.0 || power == 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g", coefficient);
        s += buf;
        if (power != 0.0) s += "*";
    }
    if (power == 1.0) {
        s += "n";
    } else if (power != 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "n^%g", power);
        s += buf;
    }
    return s;
}

SafetyEvent SafetyEvent::parse(const std::string& spec) {
    SafetyEvent event;
    auto starts_with = [&](const std::string& prefix) {
        return spec.rfind(prefix, 0) == 0;
    };
    if (starts_with("term_at_least:")) {
        event.kind = Kind::TermAtLeast;
        event.threshold = GrowthExpr::parse(spec.substr(14));
    } else if (starts_with("term>=")) {
        event.kind = Kind::TermAtLeast;
        event.threshold = GrowthExpr::parse(spec.substr(6));
    } else if (starts_with("msafe_until_simlen:")) {
        event.kind = Kind::MSafeUntilSimLen;
        event.threshold = GrowthExpr::parse(spec.substr(19));
    } else if (starts_with("msafe:")) {
        event.kind = Kind::MSafeUntilSimLen;
        event.threshold = GrowthExpr::parse(spec.substr(6));
    } else {
        throw SimulationError("unknown event spec: " + spec +
                              " (expected term_at_least:<expr> or msafe_until_simlen:<expr>)");
    }
    return event;
}

std::string SafetyEvent::to_string() const {
    return (kind == Kind::TermAtLeast ? std::string("term_at_least:") :
                                        std::string("msafe_until_simlen:")) +
           threshold.to_string();
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials) {
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2 * n)) / denom;
    const double half = (z / denom) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return WilsonInterval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

SimStats estimate_statistics(const Model& model, const StrategyFactory& factory,
                             const std::vector<std::int64_t>& n_grid, std::int64_t trials,
                             const HorizonFn& horizon_fn, std::uint64_t seed,
                             const std::optional<SafetyEvent>& event, int jobs) {
    if (trials < 1) throw SimulationError("trials must be at least 1");
    ModelRuntime runtime(model);
    SimStats stats;
    stats.seed = seed;
    for (std::int64_t n : n_grid) {
        TrialPlan plan = factory(n);
        const std::int64_t horizon = horizon_fn(n);
        if (horizon < 1) throw SimulationError("horizon must be at least 1");
        std::optional<std::int64_t> threshold;
        if (event) {
            if (event->kind == SafetyEvent::Kind::MSafeUntilSimLen && !plan.scheme_cycles) {
                throw SimulationError("m-safety events require a scheme strategy");
            }
            threshold = event->threshold.eval(n, plan.scheme_cycles);
        }

        std::vector<std::int64_t> terms(trials);
        std::vector<char> censored(trials, 0);
        std::vector<char> event_hit(trials, 0);
        auto run_range = [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t trial = lo; trial < hi; ++trial) {
                Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(n),
                                         static_cast<std::uint64_t>(trial));
                auto strategy = plan.make();
                auto outcome = run_stream(runtime, *strategy, plan.start, horizon, rng, nullptr);
                terms[trial] = outcome.term.value_or(horizon);
                censored[trial] = outcome.term.has_value() ? 0 : 1;
                if (event) {
                    if (event->kind == SafetyEvent::Kind::TermAtLeast) {
                        event_hit[trial] = terms[trial] >= *threshold ? 1 : 0;
                    } else {
                        bool safe = true;
                        for (auto m : outcome.min_prefix_scheme) {
                            if (m < -*threshold) safe = false;
                        }
                        event_hit[trial] = safe ? 1 : 0;
                    }
                }
            }
        };
        const int workers = std::max(1, jobs);
        if (workers == 1) {
            run_range(0, trials);
        } else {
            std::vector<std::thread> pool;
            const std::int64_t chunk = (trials + workers - 1) / workers;
            for (int w = 0; w < workers; ++w) {
                const std::int64_t lo = w * chunk;
                const std::int64_t hi = std::min<std::int64_t>(trials, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(run_range, lo, hi);
            }
            for (auto& t : pool) t.join();
        }

        SimStats::Row row;
        row.n = n;
        row.trials = trials;
        row.horizon = horizon;
        for (std::int64_t trial = 0; trial < trials; ++trial) {
            row.sum_term += terms[trial];
            row.sum_term_sq += static_cast<unsigned __int128>(terms[trial]) *
                               static_cast<unsigned __int128>(terms[trial]);
            row.censored += censored[trial];
            row.event_count += event_hit[trial];
        }
        row.mean = static_cast<double>(row.sum_term) / static_cast<double>(trials);
        if (trials > 1) {
            const double sum = static_cast<double>(row.sum_term);
            const double sumsq = static_cast<double>(row.sum_term_sq);
            double variance = (sumsq - sum * sum / trials) / static_cast<double>(trials - 1);
            if (variance < 0) variance = 0;
            row.stderr_mean = std::sqrt(variance / static_cast<double>(trials));
        }
        std::vector<std::int64_t> sorted = terms;
        std::sort(sorted.begin(), sorted.end());
        auto quantile = [&](double q) {
            auto idx = static_cast<std::int64_t>(std::ceil(q * trials)) - 1;
            idx = std::clamp<std::int64_t>(idx, 0, trials - 1);
            return sorted[idx];
        };
        row.q50 = quantile(0.5);
        row.q90 = quantile(0.9);
        row.q99 = quantile(0.99);
        if (event) {
            row.event_freq = static_cast<double>(row.event_count) / static_cast<double>(trials);
            auto ci = wilson_interval(row.event_count, trials);
            row.event_ci_low = ci.low;
            row.event_ci_high = ci.high;
        }
        stats.rows.push_back(std::move(row));
    }
    return stats;
}

EventReport estimate_event(const Model& model, const StrategyFactory& factory,
                           const std::vector<std::int64_t>& n_grid, const SafetyEvent& event,
                           std::int64_t trials, const HorizonFn& horizon_fn, std::uint64_t seed,
                           int jobs) {
    SimStats stats = estimate_statistics(model, factory, n_grid, trials, horizon_fn, seed, event, jobs);
    EventReport report;
    for (const auto& row : stats.rows) {
        report.rows.push_back(EventReport::Row{row.n, *row.event_freq, *row.event_ci_low,
                                               *row.event_ci_high});
    }
    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
        const auto& a = report.rows[i];
        const auto& b = report.rows[i + 1];
        if (b.freq < a.freq && b.ci_high < a.ci_low) {
            report.nondecreasing_within_ci = false;
        }
    }
    return report;
}

double fit_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) {
        throw SimulationError("exponent fit needs at least 3 points");
    }
    double sx = 0, sy = 0;
    for (const auto& [n, mean] : points) {
        if (n <= 0 || mean <= 0) throw SimulationError("exponent fit needs positive points");
        sx += std::log(n);
        sy += std::log(mean);
    }
    const double mx = sx / points.size();
    const double my = sy / points.size();
    double num = 0, den = 0;
    for (const auto& [n, mean] : points) {
        const double dx = std::log(n) - mx;
        num += dx * (std::log(mean) - my);
        den += dx * dx;
    }
    if (den == 0) throw SimulationError("exponent fit needs distinct n values");
    return num / den;
}

}  // namespace pvass
