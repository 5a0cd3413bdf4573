#pragma once

#include "mac/adversary.hpp"
#include "mac/types.hpp"

#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>

namespace mac {

/// Classification flags exposed by every automaton so harnesses can filter
/// (all full-sensing algorithms, all ack-based ones, ...).
struct AlgorithmClass {
    enum class Kind { AckBased, FullSensing, Adaptive };
    Kind kind = Kind::FullSensing;
    bool withholds_channel = false;
    bool queue_size_oblivious = false;
    bool requires_collision_detection = false;

    bool full_sensing() const { return kind != Kind::Adaptive; }
};

/// Maps shared sub-states (e.g. a centralized controller) to their copies so
/// a station set clones into an equally-wired independent set.
class CloneContext {
public:
    template <class T>
    std::shared_ptr<T> share(const std::shared_ptr<T>& original) {
        auto it = mapped_.find(original.get());
        if (it != mapped_.end()) return std::static_pointer_cast<T>(it->second);
        auto copy = std::make_shared<T>(*original);
        mapped_[original.get()] = copy;
        return copy;
    }

private:
    std::unordered_map<const void*, std::shared_ptr<void>> mapped_;
};

/// Deterministic per-station state machine. One round is:
///   (i)   decide(): transmit a message or pause, from current state alone;
///   (ii)  the channel computes feedback for everyone;
///   (iii) the adversary's packets for this round are fixed;
///   (iv)  transition(feedback, own, injected): injected packets are
///         enqueued, a successful transmitter discards its packet and
///         dequeues the next pending one (FIFO), control state advances.
///
/// The base class owns the FIFO queue and the pending slot; decide() in a
/// subclass must be a pure function of state (checked by clone-replay tests).
class StationAutomaton {
public:
    explicit StationAutomaton(StationId name, AlgorithmClass cls)
        : name_(name), class_(cls) {}
    virtual ~StationAutomaton() = default;

    StationId name() const { return name_; }
    const AlgorithmClass& algorithm_class() const { return class_; }

    virtual std::optional<Message> decide() = 0;
    virtual void transition(const Feedback& fb, const std::optional<Message>& own,
                            std::span<const Packet> injected) = 0;
    virtual std::unique_ptr<StationAutomaton> clone(CloneContext& ctx) const = 0;
    /// One-line internal state summary for diagnostics.
    virtual std::string debug_state() const { return ""; }

    /// Packets held (queue + pending), dummies excluded. The reservation
    /// wrapper overrides this to include its side buffer.
    virtual int stored_count() const {
        int c = static_cast<int>(queue_.size());
        if (pending_ && !pending_->dummy) ++c;
        return c;
    }
    bool has_pending() const { return pending().has_value(); }
    virtual const std::optional<Packet>& pending() const { return pending_; }
    virtual const std::deque<Packet>& queue() const { return queue_; }

protected:
    /// Default packet bookkeeping for step (iv): enqueue injections, discard a
    /// heard own packet, refill pending FIFO. Subclasses call this and then
    /// update their control state.
    void standard_packet_step(const Feedback& fb, const std::optional<Message>& own,
                              std::span<const Packet> injected) {
        for (const Packet& p : injected) queue_.push_back(p);
        if (own && own->packet && fb.heard()) pending_.reset();
        refill_pending();
    }
    void refill_pending() {
        if (!pending_ && !queue_.empty()) {
            pending_ = queue_.front();
            queue_.pop_front();
        }
    }

    StationId name_;
    AlgorithmClass class_;
    std::deque<Packet> queue_;
    std::optional<Packet> pending_;

    friend class ReservationWrapped;
};

using StationSet = std::vector<std::unique_ptr<StationAutomaton>>;

/// Everything the channel records about one round.
struct RoundRecord {
    Round round = 0;
    RoundInjections injections;          // nonzero entries, stations ascending
    std::vector<StationId> transmitters; // ascending
    Feedback feedback;                   // as delivered (collisions masked without CD)
    std::vector<int> queue_sizes;        // per station 1..n, queued + pending, no dummies
    std::optional<Packet> heard;         // the packet heard, if any (may be a dummy)

    int total_stored() const {
        int t = 0;
        for (int q : queue_sizes) t += q;
        return t;
    }
    bool heard_real_packet() const { return heard.has_value() && !heard->dummy; }
    /// No packet on the channel this round (silence, collision, or a
    /// control-bits-only message).
    bool void_round() const { return !heard.has_value(); }
};

struct Trace {
    ChannelConfig config;
    AdversaryType adversary_type;
    std::vector<RoundRecord> records;

    Round horizon() const { return static_cast<Round>(records.size()); }
    /// The injections of this trace as a replayable script.
    InjectionScript injection_script() const;
};

/// Full system snapshot: all station states plus channel config and the round
/// counter. Cloning yields an independent system; advancing one never touches
/// the other.
class SimulationState {
public:
    SimulationState(StationSet stations, ChannelConfig config);
    SimulationState(const SimulationState& other);
    SimulationState& operator=(const SimulationState& other);
    SimulationState(SimulationState&&) = default;
    SimulationState& operator=(SimulationState&&) = default;

    const ChannelConfig& config() const { return config_; }
    Round round() const { return round_; }  // rounds completed so far
    int station_count() const { return static_cast<int>(stations_.size()); }
    const StationAutomaton& station(StationId id) const { return *stations_[id - 1]; }

    int total_stored() const;
    /// Hash of the observable state (round, queue contents, pending slots);
    /// used to assert that probing clones never mutates the original.
    std::uint64_t fingerprint() const;

    /// Runs one round with the given injections. Unknown station names are
    /// rejected before any mutation.
    RoundRecord step_round(const RoundInjections& injections);

private:
    ChannelConfig config_;
    StationSet stations_;
    Round round_ = 0;
    std::uint64_t next_packet_id_ = 1;
};

inline SimulationState clone_state(const SimulationState& s) { return s; }

/// Raised when the adversary emits injections its declared type forbids.
struct AdversaryViolation : std::runtime_error {
    AdversaryViolation(Round round, Violation v)
        : std::runtime_error("adversary violated its type at round " +
                             std::to_string(round) + ": " + v.describe()),
          round(round),
          violation(v) {}
    Round round;
    Violation violation;
};

/// Runs `horizon` rounds from the initial states (empty queues) with the
/// adversary's feasibility checked online against `type`.
Trace run(SimulationState& state, InjectionSource& source, const AdversaryType& type,
          Round horizon);

/// Convenience: build the state, run, return both trace and final state.
Trace run(StationSet stations, ChannelConfig config, InjectionSource& source,
          const AdversaryType& type, Round horizon);

}  // namespace mac
