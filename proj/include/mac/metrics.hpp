#pragma once

#include "mac/core.hpp"

#include <iosfwd>
#include <string>

namespace mac {

/// Quality-of-service measures extracted from a trace. Dummy packets are
/// excluded from every count; a round is void when no packet at all was heard
/// (silence, collision, or a control-bits-only message).
struct QoSReport {
    int n = 0;
    Round horizon = 0;
    std::int64_t injected = 0;
    std::int64_t heard = 0;            // real packets delivered
    int max_stored = 0;                // peak queued + pending over the trace
    Round max_latency = 0;             // peak heard_round - injected_round
    Round max_exclusive_delay = 0;     // peak heard - injected - 1 (scheduler convention)
    Round max_pending_wait = 0;        // peak rounds from becoming pending to being heard
    std::int64_t unheard = 0;          // injected but never heard
    std::vector<std::uint64_t> unheard_ids;
    Round void_rounds = 0;
    Round collision_rounds = 0;        // rounds with two or more transmitters
    double throughput = 0.0;           // heard / horizon

    std::string to_text() const;       // flat key=value block
    std::string to_json() const;       // machine-readable record
};

/// Thrown when a trace fails its conservation invariant.
struct ConservationError : std::runtime_error {
    ConservationError(Round round, std::int64_t injected, std::int64_t heard,
                      std::int64_t stored)
        : std::runtime_error("conservation violated at round " + std::to_string(round) +
                             ": injected=" + std::to_string(injected) +
                             " heard=" + std::to_string(heard) +
                             " stored=" + std::to_string(stored)),
          round(round) {}
    Round round;
};

/// Computes the report, checking conservation at every prefix:
/// injected = heard + stored must hold at the end of each round.
QoSReport analyze(const Trace& trace);

/// A named theorem bound with its parameters resolved to one number.
struct Bound {
    std::string name;       // which guarantee is being checked
    std::string quantity;   // "max_stored" | "max_latency" | "max_exclusive_delay"
    std::int64_t allowed = 0;
    bool lower_bound = false;  // true: observed >= allowed is the passing direction

    std::string describe() const;
};

struct BoundCheck {
    Bound bound;
    std::int64_t observed = 0;
    bool pass = false;
    std::string describe() const;
};

BoundCheck check_bound(const QoSReport& report, const Bound& bound);

/// Bound constructors mirroring the guarantees the protocols come with.
Bound bound_mbtf_stored(int n, std::int64_t b);          // <= 2(n^2+b)
Bound bound_two_adaptive_stored(std::int64_t b);         // <= b+2
Bound bound_two_fs_latency(std::int64_t w);              // <= 4w
Bound bound_three_window_latency(std::int64_t w);        // <= 2w+1
Bound bound_three_col_det_latency(std::int64_t w);       // < 5w
Bound bound_three_plain_latency(std::int64_t w);         // < 5w + w
Bound bound_centralized_delay(std::int64_t b);           // exclusive delay <= b+1
Bound bound_ack_primes_latency(int n);                   // <= ceil(6 n^2 ln n) pending wait
Bound bound_omega_n2_stored(int n);                      // >= (n/2-1)^2, lower bound

}  // namespace mac
