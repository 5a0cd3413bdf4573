#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mac {

/// Rounds are numbered from 1. Round 0 means "before the execution starts".
using Round = std::int64_t;

/// Station names are the integers 1..n.
using StationId = int;

/// An abstract packet token. Contents never affect state transitions; the
/// fields exist so traces can account for latency and conservation.
struct Packet {
    std::uint64_t id = 0;
    Round injected_round = 0;
    StationId injected_station = 0;
    bool dummy = false;  // created by the reservation wrapper, never by an adversary

    friend bool operator==(const Packet&, const Packet&) = default;
};

/// What a station puts on the channel in one round: a packet, control bits,
/// or both. A message with neither is not a message (represented as a pause).
struct Message {
    std::optional<Packet> packet;
    std::string control;  // algorithm-defined control payload; empty = none

    bool empty() const { return !packet.has_value() && control.empty(); }
    friend bool operator==(const Message&, const Message&) = default;
};

enum class FeedbackKind { Heard, Silence, Collision };

/// Channel feedback delivered to every station at the end of step (ii).
/// Collision is only ever delivered on a channel with collision detection;
/// without it, collisions arrive as Silence.
struct Feedback {
    FeedbackKind kind = FeedbackKind::Silence;
    std::optional<Message> message;  // set iff kind == Heard

    bool heard() const { return kind == FeedbackKind::Heard; }
    friend bool operator==(const Feedback&, const Feedback&) = default;
};

struct ChannelConfig {
    int n = 1;  // station count; names are exactly 1..n
    bool collision_detection = false;

    friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

}  // namespace mac
