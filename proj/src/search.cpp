#include "mac/search.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace mac {

namespace {

/// One candidate injection pattern, evaluated round by round from a probe
/// frontier (offset 0 = the next round).
struct Pattern {
    enum class Kind { Single, Pair, SkipSingle, SkipPair };
    Kind kind;
    StationId a = 0;
    StationId b = 0;

    RoundInjections at(int offset) const {
        switch (kind) {
            case Kind::Single:
                return {{a, 1}};
            case Kind::Pair:
                return offset % 2 == 0 ? RoundInjections{{a, 1}, {b, 1}} : RoundInjections{};
            case Kind::SkipSingle:
                return offset == 0 ? RoundInjections{} : RoundInjections{{a, 1}};
            case Kind::SkipPair:
                if (offset == 0) return {};
                return (offset - 1) % 2 == 0 ? RoundInjections{{a, 1}, {b, 1}}
                                             : RoundInjections{};
        }
        return {};
    }
};

std::int64_t total_of(const RoundInjections& inj) {
    std::int64_t t = 0;
    for (const auto& [s, c] : inj) t += c;
    return t;
}

FeedbackKind milestone_kind(const RoundRecord& rec) {
    return rec.transmitters.size() >= 2 ? FeedbackKind::Collision : FeedbackKind::Silence;
}

/// Shared machinery: a committed system plus its feasibility accounting, with
/// helpers to commit rounds and hunt for the earliest reachable void round.
class Hunter {
public:
    Hunter(const SimulationState& system, const AdversaryType& type, Round horizon,
           long probe_budget)
        : sys_(system), checker_(type), type_(type), horizon_(horizon),
          probe_budget_(probe_budget) {}

    Round committed_rounds() const { return sys_.round(); }
    const SimulationState& system() const { return sys_; }
    SearchOutcome take_outcome() { return std::move(out_); }
    bool budget_left() const { return probe_budget_ > 0; }

    /// Appends one committed round; injections must satisfy the type.
    RoundRecord commit(const RoundInjections& inj) {
        if (!checker_.push(total_of(inj)))
            throw std::logic_error("search committed an infeasible round: " +
                                   checker_.violation()->describe());
        const Round r = sys_.round() + 1;
        for (const auto& [s, c] : inj) out_.script.add(r, s, c);
        RoundRecord rec = sys_.step_round(inj);
        ++rounds_since_ms_;
        injected_since_ms_ += total_of(inj);
        out_.max_stored_seen = std::max(out_.max_stored_seen, rec.total_stored());
        return rec;
    }

    /// Probes one pattern up to `depth` rounds from the given frontier;
    /// returns the offset of the earliest void round, if any.
    std::optional<int> probe_from(const SimulationState& base, const FeasibilityChecker& acc,
                                  const Pattern& p, int depth) {
        SimulationState clone = base;
        FeasibilityChecker chk = acc;
        for (int k = 0; k < depth && probe_budget_ > 0; ++k) {
            --probe_budget_;
            RoundInjections inj = p.at(k);
            if (!chk.push(total_of(inj))) return std::nullopt;
            if (clone.step_round(inj).void_round()) return k;
        }
        return std::nullopt;
    }

    std::optional<int> probe(const Pattern& p, int depth) {
        return probe_from(sys_, checker_, p, depth);
    }

    /// Whether the pattern prefix plus the balancing milestone injection fits
    /// the type. The milestone round replaces the pattern's own injections
    /// there, which may need a catch-up burst the type cannot absorb.
    bool milestone_feasible(const Pattern& p, int offset) {
        FeasibilityChecker chk = checker_;
        std::int64_t injected = injected_since_ms_;
        for (int k = 0; k < offset; ++k) {
            const std::int64_t t = total_of(p.at(k));
            if (!chk.push(t)) return false;
            injected += t;
        }
        const std::int64_t need = rounds_since_ms_ + offset + 1 - injected;
        if (need < 0 || need > type_.burstiness()) return false;
        return chk.push(need);
    }

    /// Commits pattern rounds up to the found void round, then the milestone
    /// round itself with exactly the number of packets that keeps the
    /// interval average at one per round.
    bool commit_milestone(const Pattern& p, int offset) {
        for (int k = 0; k < offset; ++k) commit(p.at(k));
        const std::int64_t need = rounds_since_ms_ + 1 - injected_since_ms_;
        if (need < 0 || need > type_.burstiness())
            throw std::logic_error("milestone balancing injection out of range");
        RoundInjections inj;
        if (need >= 1) inj.emplace_back(p.a, 1);
        if (need >= 2) {
            if (p.b != 0 && p.b != p.a)
                inj.emplace_back(p.b, 1);
            else
                inj[0].second += static_cast<int>(need - 1);
        }
        RoundRecord rec = commit(inj);
        if (!rec.void_round())
            throw std::logic_error("predicted void round was not void");
        out_.milestones.push_back(
            Milestone{rec.round, milestone_kind(rec), rec.total_stored()});
        rounds_since_ms_ = 0;
        injected_since_ms_ = 0;
        return true;
    }

    /// One hunt-and-commit step over the given patterns. Returns false when
    /// nothing voids within the depth (the caller then takes the fallback).
    bool hunt_step(const std::vector<Pattern>& patterns, int depth) {
        depth = static_cast<int>(std::min<Round>(depth, horizon_ - sys_.round()));
        if (depth <= 0) return false;
        std::optional<std::pair<int, size_t>> best;  // (offset, pattern index)
        for (size_t i = 0; i < patterns.size(); ++i) {
            const int cap = best ? best->first : depth;
            if (auto k = probe(patterns[i], cap))
                if ((!best || *k < best->first) && milestone_feasible(patterns[i], *k))
                    best = {*k, i};
        }
        if (!best) return false;
        return commit_milestone(patterns[best->second], best->first);
    }

    /// Saturating tail: one packet per round into station 1 to the horizon.
    void fallback_tail() {
        out_.fallback_taken = true;
        while (sys_.round() < horizon_) commit({{1, 1}});
    }

protected:
    SimulationState sys_;
    FeasibilityChecker checker_;
    AdversaryType type_;
    Round horizon_;
    long probe_budget_;
    SearchOutcome out_;
    Round rounds_since_ms_ = 0;
    std::int64_t injected_since_ms_ = 0;
};

std::vector<Pattern> default_patterns(const std::vector<StationId>& targets,
                                      std::int64_t burstiness) {
    std::vector<Pattern> ps;
    for (StationId a : targets) ps.push_back({Pattern::Kind::Single, a, 0});
    for (StationId a : targets) ps.push_back({Pattern::Kind::SkipSingle, a, 0});
    if (burstiness >= 2) {
        for (size_t i = 0; i < targets.size(); ++i)
            for (size_t j = i + 1; j < targets.size(); ++j) {
                ps.push_back({Pattern::Kind::Pair, targets[i], targets[j]});
                ps.push_back({Pattern::Kind::SkipPair, targets[i], targets[j]});
            }
    }
    return ps;
}

}  // namespace

SearchOutcome void_forcer(const SimulationState& system, const AdversaryType& type,
                          const ScenarioBudget& budget, Round horizon) {
    if (!type.rate.is_one())
        throw std::invalid_argument("void_forcer: injection rate must be 1");
    if (type.burstiness() < 2)
        throw std::invalid_argument("void_forcer: burstiness must be >= 2");
    std::vector<StationId> targets;
    for (StationId s = 1; s <= std::min(system.config().n, 4); ++s) targets.push_back(s);
    const auto patterns = default_patterns(targets, type.burstiness());

    Hunter hunter(system, type, horizon, budget.max_scenarios);
    while (hunter.committed_rounds() < horizon && hunter.budget_left()) {
        if (!hunter.hunt_step(patterns, budget.max_branch_depth)) break;
    }
    if (hunter.committed_rounds() < horizon) hunter.fallback_tail();
    SearchOutcome out = hunter.take_outcome();
    return out;
}

SearchOutcome retaining_breaker(const SimulationState& system, const ScenarioBudget& budget,
                                Round horizon) {
    if (system.config().n < 4)
        throw std::invalid_argument("retaining_breaker: needs at least four stations");
    const AdversaryType type = AdversaryType::window(2);

    Hunter hunter(system, type, horizon, budget.max_scenarios);
    // The probe schedule follows the proof's rotation over stations other
    // than the current channel holder: single-packet streams wait out the
    // holder's pending slot (which empties, the target being retaining) and
    // the 2,0 pair patterns set up colliding first transmissions.
    while (hunter.committed_rounds() < horizon && hunter.budget_left()) {
        StationId holder = 1;
        for (int s = 1; s <= system.config().n; ++s)
            if (hunter.system().station(s).has_pending()) {
                holder = s;
                break;
            }
        std::vector<StationId> others;
        for (StationId s = 1; s <= system.config().n && others.size() < 3; ++s)
            if (s != holder) others.push_back(s);
        if (!hunter.hunt_step(default_patterns(others, 2), budget.max_branch_depth)) break;
    }
    if (hunter.committed_rounds() < horizon) hunter.fallback_tail();
    return hunter.take_outcome();
}

namespace {

class OmegaBuilder : Hunter {
public:
    OmegaBuilder(const SimulationState& system, int n, Round horizon)
        : Hunter(system, AdversaryType::leaky_bucket(1), horizon, 1L << 40),
          n_(n),
          target_stored_((n / 2 - 1) * (n / 2 - 1)),
          wait_cap_(std::max<Round>(horizon / 10, 64)),
          conc_sys_(sys_),
          conc_chk_(checker_) {}

    SearchOutcome build() {
        while (frontier_round() < horizon_ && !done()) {
            if (try_quick_milestones()) continue;
            roll_stage_step();
        }
        if (!done()) out_.inconclusive = true;
        while (committed_rounds() < horizon_ && sys_.round() < frontier_round())
            commit(stage_injections_[static_cast<size_t>(sys_.round() - base_round())]);
        out_.stages_completed = stages_;
        return take_outcome();
    }

private:
    Round base_round() const { return frontier_round() - static_cast<Round>(stage_injections_.size()); }
    Round frontier_round() const { return conc_sys_.round(); }

    bool done() const {
        return stages_ >= n_ / 2 || out_.max_stored_seen >= target_stored_ ||
               static_cast<int>(out_.milestones.size()) >= 50;
    }

    /// Quick exits at the conceptual frontier: a free void round, a void
    /// forced by one injection, or a collision forced by an injected pair.
    /// The deeper probes are polled with backoff once they stop paying off.
    bool try_quick_milestones() {
        const Pattern idle{Pattern::Kind::SkipSingle, current_target(), 0};
        if (probe_from(conc_sys_, conc_chk_, idle, 1)) {
            flush_conceptual();
            return commit_milestone(idle, 0);
        }
        if (--deep_poll_in_ > 0) return false;
        for (StationId p = 1; p <= n_; ++p) {
            const Pattern single{Pattern::Kind::Single, p, 0};
            if (auto k = probe_from(conc_sys_, conc_chk_, single, 2)) {
                flush_conceptual();
                deep_backoff_ = 1;
                deep_poll_in_ = 1;
                return commit_milestone(single, *k);
            }
        }
        for (StationId p = 1; p <= n_; ++p)
            for (StationId q = p + 1; q <= n_; ++q) {
                const Pattern pair{Pattern::Kind::Pair, p, q};
                if (auto k = probe_from(conc_sys_, conc_chk_, pair, 2)) {
                    flush_conceptual();
                    deep_backoff_ = 1;
                    deep_poll_in_ = 1;
                    return commit_milestone(pair, *k);
                }
            }
        deep_backoff_ = std::min(deep_backoff_ * 2, 4096L);
        deep_poll_in_ = deep_backoff_;
        return false;
    }

    /// Turns the conceptual prefix into committed rounds (the moving-target
    /// stream is itself a legal one-per-round schedule) and resets the stage.
    void flush_conceptual() {
        for (const auto& inj : stage_injections_) commit(inj);
        reset_stage();
    }

    void reset_stage() {
        stage_injections_.clear();
        vset_.clear();
        stall_ = 0;
        conc_sys_ = sys_;
        conc_chk_ = checker_;
    }

    StationId current_target() const {
        for (StationId s = 1; s <= n_; ++s)
            if (!vset_.count(s)) return s;
        return 1;
    }

    void roll_stage_step() {
        const StationId c = current_target();
        RoundInjections inj{{c, 1}};
        conc_chk_.push(1);
        RoundRecord rec = conc_sys_.step_round(inj);
        stage_injections_.push_back(inj);
        --probe_budget_;

        if (rec.transmitters.size() == 1) {
            vset_.insert(rec.transmitters[0]);
            if (static_cast<int>(vset_.size()) == n_) {
                // Stage complete: the adversary's real injections all go to
                // the pivot, the station whose first transmission closed the
                // set, one per round across the stage.
                const StationId pivot = rec.transmitters[0];
                const size_t len = stage_injections_.size();
                for (size_t k = 0; k < len; ++k) commit({{pivot, 1}});
                ++stages_;
                reset_stage();
                return;
            }
        }
        if (++stall_ >= wait_cap_) flush_conceptual();
    }

    int n_;
    int target_stored_;
    Round wait_cap_;
    int stages_ = 0;
    std::set<StationId> vset_;
    std::vector<RoundInjections> stage_injections_;
    Round stall_ = 0;
    long deep_backoff_ = 1;
    long deep_poll_in_ = 1;
    SimulationState conc_sys_;
    FeasibilityChecker conc_chk_;
};

}  // namespace

SearchOutcome omega_n2_adversary(const SimulationState& system, int n, Round horizon) {
    if (n < 4) throw std::invalid_argument("omega_n2_adversary: needs at least four stations");
    if (system.config().n != n)
        throw std::invalid_argument("omega_n2_adversary: n does not match the system");
    return OmegaBuilder(system, n, horizon).build();
}

}  // namespace mac
