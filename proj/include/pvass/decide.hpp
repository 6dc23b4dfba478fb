#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pvass/graph.hpp"
#include "pvass/model.hpp"
#include "pvass/oracle.hpp"
#include "pvass/scheme.hpp"

namespace pvass {

struct NotStronglyConnected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PayoffDirection { Max, Min };

// Optimal gain and feasible potentials of the mean-payoff linear program;
// for Min the potentials are nonnegative.
struct MeanPayoffSolution {
    Rational value;
    std::vector<Rational> potentials;  // per state
    PayoffDirection direction = PayoffDirection::Max;
};

// Gain/bias program for sup over strategies and states of the expected mean
// payoff of a strongly connected scalar MDP.
MeanPayoffSolution max_mean_payoff(const ScalarModel& m);

// Dual program for the infimum; potentials constrained nonnegative.
MeanPayoffSolution min_mean_payoff(const ScalarModel& m);

// Whether some strategy and state achieve expected mean payoff >= 0 in every
// counter, via a feasibility program over stationary transition frequencies.
bool zero_achievable(const Model& model);

// Optimal stationary transition frequencies for the simulation strategies.
struct OptimalFlow {
    std::vector<Rational> frequency;  // per transition
    Rational value;
};

// Flow maximizing the minimal counter drift; requires strong connectivity.
OptimalFlow demonic_optimal_flow(const Model& model);

// Flow minimizing one counter's drift; requires strong connectivity.
OptimalFlow angelic_optimal_flow(const Model& model, int counter);

// Witness that all achievable mean payoffs are negative in direction w:
// positive vector w and potentials z with slack-1 inequalities at every
// transition. Implies the w-weighted maximal mean payoff is <= -slack.
struct RankingCertificate {
    std::vector<Rational> w;              // each component >= 1
    std::map<std::string, Rational> z;    // potential per state id
    Rational slack = 1;                   // >= 1
};

// Joint feasibility program in (w, z) with slack normalized to 1. Returns a
// certificate exactly when the zero vector is not achievable.
std::optional<RankingCertificate> ranking_witness(const Model& model);

// Transition-by-transition validation in exact arithmetic. Returns the first
// violated constraint, or nullopt when the certificate is valid.
std::optional<std::string> check_ranking_certificate(const Model& model,
                                                     const RankingCertificate& cert);

enum class VerdictTag { Linear, NotLinear, UnsupportedStructure };

const char* verdict_tag_name(VerdictTag tag);

enum class AnalysisMode { Demonic, Angelic };

// Angelic evidence for one bottom MEC: min mean payoff per counter
// projection; linear when some projection's value is negative.
struct ProjectionOutcome {
    int counter = 0;  // 0-based
    Rational value;
    std::vector<Rational> potentials;
};

struct MecVerdict {
    int mec_index = 0;
    VerdictTag tag = VerdictTag::Linear;
    std::optional<RankingCertificate> certificate;       // demonic Linear
    std::optional<NonnegCombination> combination;        // demonic NotLinear
    std::vector<ProjectionOutcome> projections;          // angelic
    std::optional<int> linear_counter;                   // angelic Linear: 0-based winning counter
};

struct Verdict {
    VerdictTag tag = VerdictTag::Linear;
    AnalysisMode mode = AnalysisMode::Demonic;
    StructureTag structure = StructureTag::StronglyConnected;
    std::vector<MecVerdict> per_mec;
    std::vector<std::vector<std::string>> cycle_witness;  // MEC state ids, for UnsupportedStructure
};

// Demonic decision: strongly connected models via the ranking witness (with
// a nonnegative increment combination as the non-linearity evidence),
// DAG-like models MEC by MEC, general structure refused with the offending
// cycle named.
Verdict decide_demonic(const Model& model, std::uint64_t cap = kDefaultStrategyCap);

// Angelic decision for any structure: linear iff every bottom MEC has some
// counter projection with negative minimal mean payoff.
Verdict decide_angelic(const Model& model);

}  // namespace pvass
