#pragma once

#include "mac/types.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mac {

/// Injection rate as an exact rational p/q with 0 < p/q <= 1. All boundary
/// comparisons in the validator are done in scaled integer arithmetic so a
/// segment sitting exactly on its cap is never misjudged.
struct Rate {
    std::int64_t num = 1;
    std::int64_t den = 1;

    static Rate one() { return {1, 1}; }
    bool is_one() const { return num == den; }
    friend bool operator==(const Rate&, const Rate&) = default;
};

/// Constraint descriptor for an injection source.
///  - Window(rate, w): every contiguous segment of w rounds carries at most
///    floor(rate*w) packets.
///  - LeakyBucket(rate, b): every contiguous segment of t >= 1 rounds carries
///    at most rate*t + b packets.
struct AdversaryType {
    enum class Kind { Window, LeakyBucket };
    Kind kind = Kind::Window;
    Rate rate;
    std::int64_t w = 1;  // window size (Window only), >= 1
    std::int64_t b = 0;  // bucket burst allowance (LeakyBucket only), >= 0

    static AdversaryType window(std::int64_t w, Rate rate = Rate::one());
    static AdversaryType leaky_bucket(std::int64_t b, Rate rate = Rate::one());

    /// Maximum packets injectable in a single round: floor(rate*w) for a
    /// window type, floor(rate + b) for a leaky bucket.
    std::int64_t burstiness() const;

    std::string describe() const;
    friend bool operator==(const AdversaryType&, const AdversaryType&) = default;
};

/// One round's injections: (station, count) pairs with count >= 1, stations
/// ascending. Rounds with no injections are simply absent.
using RoundInjections = std::vector<std::pair<StationId, int>>;

/// A finite injection schedule. rounds[i] holds the injections of round i+1
/// (index 0 = round 1); trailing empty rounds are meaningful for length.
struct InjectionScript {
    std::vector<RoundInjections> rounds;

    Round length() const { return static_cast<Round>(rounds.size()); }
    std::int64_t total_packets() const;
    /// Grow to `len` rounds, then add `count` packets into `station` at
    /// 1-based round `r` (extends the script if needed).
    void add(Round r, StationId station, int count);

    /// Line format: "round station count", one triple per line, rounds
    /// non-decreasing, stations ascending within a round. Round-trips
    /// bit-exactly through parse(). A final "# length N" line pins the
    /// script length so trailing injection-free rounds survive.
    std::string serialize() const;
    static InjectionScript parse(const std::string& text);

    friend bool operator==(const InjectionScript&, const InjectionScript&) = default;
};

/// Outcome of validating a script against a type: either feasible, or the
/// earliest-ending violating segment [seg_begin, seg_end] with what was
/// injected there and what the type allows.
struct Violation {
    Round seg_begin = 0;
    Round seg_end = 0;
    std::int64_t injected = 0;
    std::int64_t allowed = 0;
    std::string describe() const;
};

struct ValidationResult {
    std::optional<Violation> violation;
    bool feasible() const { return !violation.has_value(); }
};

ValidationResult validate(const InjectionScript& script, const AdversaryType& type);

/// Streaming form of validate(); feed one round total at a time. Used by the
/// run loop (adversary feasibility is checked online, not trusted) and by
/// the search module's probe accounting. Copyable; copies are independent.
class FeasibilityChecker {
public:
    explicit FeasibilityChecker(const AdversaryType& type);

    /// Account one more round carrying `count` packets. Returns feasible-so-far;
    /// once violated, stays violated and remembers the first violation.
    bool push(std::int64_t count);
    /// Largest count that could be pushed next without violating.
    std::int64_t slack() const;
    bool violated() const { return violation_.has_value(); }
    const std::optional<Violation>& violation() const { return violation_; }
    Round rounds_seen() const { return round_; }

private:
    AdversaryType type_;
    Round round_ = 0;
    std::optional<Violation> violation_;
    // Window: ring of the last w round totals.
    std::deque<std::int64_t> window_;
    std::int64_t window_sum_ = 0;
    // Leaky bucket: scaled running maximum of suffix loads, with the start
    // round of the maximizing suffix for violation reporting.
    std::int64_t bucket_load_ = 0;  // q * max_suffix(sum - rate*len), clamped at >= 0
    Round bucket_start_ = 1;
    std::int64_t bucket_injected_ = 0;  // packets in the tracked suffix
};

/// A (possibly infinite) source of injections; a horizon truncates it.
/// Sources are stateful and single-owner.
class InjectionSource {
public:
    virtual ~InjectionSource() = default;
    /// Injections for round r. Called exactly once per round, r = 1, 2, ...
    virtual RoundInjections injections_for(Round r) = 0;
};

/// One packet per round into a fixed target station.
std::unique_ptr<InjectionSource> saturating(StationId target);
/// One packet per round, target cycling 1..n.
std::unique_ptr<InjectionSource> saturating_cycle(int n);

/// One packet into each of a and b at odd rounds of its activation, nothing
/// at even rounds (the 2,0,2,0,... pattern). Requires a != b.
std::unique_ptr<InjectionSource> pattern_pair(StationId a, StationId b);

/// Replays a script verbatim, then injects nothing.
std::unique_ptr<InjectionSource> scripted(InjectionScript script);

/// Deterministic random feasible script for the given type: each round draws
/// a load within the checker's slack (biased toward small bursts) and spreads
/// it over uniformly chosen stations. Always validates feasible.
InjectionScript random_feasible_script(const AdversaryType& type, int n, Round horizon,
                                       std::uint64_t seed);

}  // namespace mac
