#pragma once

#include "mac/core.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace mac {

// ---------------------------------------------------------------------------
// Station-set factories. Each returns stations named 1..n in order, in their
// initial states (empty queues). Naming conventions follow the protocol
// descriptions: station 1 plays p, station 2 plays q, station 3 plays r.
// ---------------------------------------------------------------------------

/// Station i transmits its pending packet exactly at rounds k with
/// k == i (mod n). Full sensing; fair; not stable.
StationSet round_robin(int n);

/// Acknowledgment-based sample whose transmission sequence is all ones:
/// transmit at every round spent on the current packet.
StationSet all_ones(int n);

/// Acknowledgment-based prime schedule. Station p transmits at rounds
/// base + i*x_p of processing its current packet, where x_p is the p-th
/// prime in [m ln m, 3m ln m), base = ceil(3 m^2 ln m), and m = max(n, 21)
/// (systems of up to 20 stations run the 21-station construction with the
/// missing stations absent). Fair against every leaky-bucket adversary:
/// each pending packet is heard within 6 m^2 ln m rounds.
StationSet ack_primes(int n);

/// Parameters of the ack_primes schedule, exposed for tests and bounds.
struct AckPrimesSchedule {
    int m = 0;                        // effective construction size
    std::int64_t base = 0;            // ceil(3 m^2 ln m)
    std::int64_t fairness_bound = 0;  // ceil(6 m^2 ln m)
    std::vector<std::int64_t> primes; // x_1 .. x_m
};
AckPrimesSchedule ack_primes_schedule(int n);

/// Centralized scheduler: an out-of-band controller collects last round's
/// injection counts from every station, keeps a FIFO of station-labelled
/// tokens, and designates at most one station to transmit next round.
/// Packet delay is at most b+1 against a leaky bucket of allowance b,
/// counting neither the injection round nor the transmission round.
StationSet centralized(int n);

/// Cyclic token passing (stations 1..n, token starts at 1). The holder
/// transmits while it has a pending packet, attaches an "over" bit when its
/// queue is empty (handing the token to the next station), and a silent round
/// moves the token to the next station without any transmission. Withholds
/// the channel; queue-size oblivious.
StationSet token_cycle(int n);

/// The two-station token protocol (token_cycle specialized to n = 2):
/// stable with at most b+2 packets stored against a leaky bucket of
/// allowance b, but not fair.
StationSet two_adaptive();

/// Fixed-window full-sensing protocol for two stations: phases of exactly
/// i rounds, packets injected during a phase are transmitted in the next one.
StationSet two_full_sensing_i(int i);

/// Adaptive-window version: starts at window 1 and, on each collision (both
/// stations transmitted and heard nothing), unloads all queued packets and
/// restarts with window i+1, buffering the adversary's per-round injection
/// counts in a private DELAY queue. Packet latency at most 4w against the
/// window adversary of size w.
StationSet two_full_sensing();

/// Three-station adaptive protocol for a known window i: phases of i rounds
/// (first phase i+1), a designated last station closes every phase with a
/// status bit, and "over" bits let the three stations transmit back to back.
/// Latency at most 2w+1 when i = w matches the adversary.
StationSet three_adaptive_window(int i);

/// Escalating version relying on channel collision detection; latency < 5w.
StationSet three_adaptive_col_det();

/// Escalating version for a channel without collision detection: collisions
/// are simulated by silences (every station aware of a collision transmits at
/// the phase's last round, forcing a silence there that everyone can read).
/// Latency at most w beyond three_adaptive_col_det.
StationSet three_adaptive();

/// Stable token-list protocol for any n: all stations keep identical lists
/// (initially 1..n); the token holder transmits; a holder with at least n
/// packets announces big status, moves to the list front and keeps the token.
/// Never collides; stores at most 2(n^2+b) packets against a leaky bucket of
/// allowance b; not fair.
StationSet move_big_to_front(int n);

/// Retaining transformation: simulates a queue-size-oblivious inner protocol
/// at regular rounds, while stations that transmit with a nonempty queue
/// reserve the second currently-unreserved future round for an extra
/// transmission of their own. Rejects inner sets whose declared class is not
/// queue-size oblivious.
StationSet reservation_wrap(StationSet inner);

/// Decodes the reservation-wrapper control prefix of a heard message:
/// returns (sender, action) where action is +1 reserve, -1 cancel, 0 none.
/// Exposed so tests can reconstruct the reservation array from a trace.
std::optional<std::pair<StationId, int>> parse_reservation_bits(const std::string& control);

}  // namespace mac
