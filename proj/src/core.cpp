#include "mac/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace mac {

InjectionScript Trace::injection_script() const {
    InjectionScript script;
    script.rounds.resize(records.size());
    for (const auto& rec : records)
        script.rounds[static_cast<size_t>(rec.round - 1)] = rec.injections;
    return script;
}

SimulationState::SimulationState(StationSet stations, ChannelConfig config)
    : config_(config), stations_(std::move(stations)) {
    if (config_.n < 1) throw std::invalid_argument("station count must be >= 1");
    if (static_cast<int>(stations_.size()) != config_.n)
        throw std::invalid_argument("station set size does not match config.n");
    for (int i = 0; i < config_.n; ++i)
        if (stations_[static_cast<size_t>(i)]->name() != i + 1)
            throw std::invalid_argument("station names must be exactly 1..n in order");
}

SimulationState::SimulationState(const SimulationState& other)
    : config_(other.config_), round_(other.round_), next_packet_id_(other.next_packet_id_) {
    CloneContext ctx;
    stations_.reserve(other.stations_.size());
    for (const auto& st : other.stations_) stations_.push_back(st->clone(ctx));
}

SimulationState& SimulationState::operator=(const SimulationState& other) {
    if (this != &other) {
        SimulationState copy(other);
        *this = std::move(copy);
    }
    return *this;
}

int SimulationState::total_stored() const {
    int total = 0;
    for (const auto& st : stations_) total += st->stored_count();
    return total;
}

std::uint64_t SimulationState::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::uint64_t>(round_));
    mix(next_packet_id_);
    for (const auto& st : stations_) {
        mix(st->pending() ? st->pending()->id + 1 : 0);
        for (const Packet& p : st->queue()) mix(p.id);
        mix(static_cast<std::uint64_t>(st->stored_count()));
    }
    return h;
}

RoundRecord SimulationState::step_round(const RoundInjections& injections) {
    for (const auto& [station, count] : injections) {
        if (station < 1 || station > config_.n)
            throw std::invalid_argument("injection into unknown station " +
                                        std::to_string(station));
        if (count < 0) throw std::invalid_argument("negative injection count");
    }

    RoundRecord rec;
    rec.round = round_ + 1;

    // (i) every station transmits or pauses according to its current state.
    std::vector<std::optional<Message>> actions(stations_.size());
    for (size_t i = 0; i < stations_.size(); ++i) {
        actions[i] = stations_[i]->decide();
        if (actions[i] && actions[i]->empty()) actions[i].reset();
        if (actions[i]) rec.transmitters.push_back(static_cast<StationId>(i + 1));
    }

    // (ii) feedback: heard iff exactly one transmitter.
    if (rec.transmitters.size() == 1) {
        const auto& msg = *actions[static_cast<size_t>(rec.transmitters[0] - 1)];
        rec.feedback = Feedback{FeedbackKind::Heard, msg};
        rec.heard = msg.packet;
    } else if (rec.transmitters.size() >= 2 && config_.collision_detection) {
        rec.feedback = Feedback{FeedbackKind::Collision, std::nullopt};
    } else {
        rec.feedback = Feedback{FeedbackKind::Silence, std::nullopt};
    }

    // (iii) the adversary's packets materialize.
    std::vector<std::vector<Packet>> arrivals(stations_.size());
    for (const auto& [station, count] : injections) {
        if (count == 0) continue;
        rec.injections.emplace_back(station, count);
        for (int k = 0; k < count; ++k)
            arrivals[static_cast<size_t>(station - 1)].push_back(
                Packet{next_packet_id_++, rec.round, station, false});
    }
    std::sort(rec.injections.begin(), rec.injections.end());

    // (iv) state transitions.
    for (size_t i = 0; i < stations_.size(); ++i)
        stations_[i]->transition(rec.feedback, actions[i], arrivals[i]);

    round_ = rec.round;
    rec.queue_sizes.resize(stations_.size());
    for (size_t i = 0; i < stations_.size(); ++i)
        rec.queue_sizes[i] = stations_[i]->stored_count();
    return rec;
}

Trace run(SimulationState& state, InjectionSource& source, const AdversaryType& type,
          Round horizon) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    for (int i = 1; i <= state.config().n; ++i)
        if (state.station(i).algorithm_class().requires_collision_detection &&
            !state.config().collision_detection)
            throw std::invalid_argument(
                "algorithm requires collision detection but the channel has none");

    Trace trace;
    trace.config = state.config();
    trace.adversary_type = type;
    trace.records.reserve(static_cast<size_t>(horizon));
    FeasibilityChecker checker(type);
    for (Round r = 1; r <= horizon; ++r) {
        RoundInjections inj = source.injections_for(r);
        std::int64_t total = 0;
        for (const auto& [s, c] : inj) total += c;
        if (!checker.push(total))
            throw AdversaryViolation(r, *checker.violation());
        trace.records.push_back(state.step_round(inj));
    }
    return trace;
}

Trace run(StationSet stations, ChannelConfig config, InjectionSource& source,
          const AdversaryType& type, Round horizon) {
    SimulationState state(std::move(stations), config);
    return run(state, source, type, horizon);
}

}  // namespace mac
