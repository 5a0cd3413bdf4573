#pragma once

#include "mac/core.hpp"

namespace mac {

/// A void round forced by an adaptive adversary, certifying queue growth:
/// between consecutive milestones the committed injections average exactly
/// one packet per round, so the stored total at the i-th milestone is at
/// least i+1.
struct Milestone {
    Round round = 0;
    FeedbackKind kind = FeedbackKind::Silence;  // Collision iff >= 2 transmitters
    int queued_at_milestone = 0;
};

/// Limits for counterfactual probing. Probes clone the committed system and
/// are discarded; every hypothetical injection prefix is feasibility-checked
/// against the target type before being explored.
struct ScenarioBudget {
    int max_branch_depth = 160;    // rounds of lookahead per probe pattern
    long max_scenarios = 2000000;  // total probe rounds across the search
};

struct SearchOutcome {
    InjectionScript script;            // the committed injections
    std::vector<Milestone> milestones;
    bool fallback_taken = false;       // no void found within budget; saturating tail
    bool inconclusive = false;         // horizon ended mid-construction
    int stages_completed = 0;          // forced-congestion stages finished
    int max_stored_seen = 0;           // peak storage on the committed trajectory
};

/// Greedy milestone hunter: repeatedly probes candidate injection patterns on
/// clones of the committed system, commits whichever pattern reaches a void
/// round soonest (adjusting the milestone round's injections to keep the
/// interval average at exactly one packet per round), and falls back to a
/// saturating tail when no pattern voids within the budget. Requires rate 1
/// and burstiness >= 2.
SearchOutcome void_forcer(const SimulationState& system, const AdversaryType& type,
                          const ScenarioBudget& budget, Round horizon);

/// Stage/pivot congestion builder against a leaky bucket of allowance 1
/// (burstiness 2). Alternates quick void probes with a conceptual roll that
/// injects into the least-named station not yet seen transmitting; when every
/// station has appeared the stage's rounds are committed with all injections
/// aimed at that stage's pivot. Stops once floor(n/2) stages are complete,
/// the (n/2-1)^2 storage target is reached, or 50 milestones are banked.
SearchOutcome omega_n2_adversary(const SimulationState& system, int n, Round horizon);

/// void_forcer specialised to four distinguished stations against the window
/// adversary of size 2: single-target streams into stations with packets on
/// hand and alternating 2,0 pair patterns over the three stations other than
/// the current channel holder.
SearchOutcome retaining_breaker(const SimulationState& system, const ScenarioBudget& budget,
                                Round horizon);

}  // namespace mac
