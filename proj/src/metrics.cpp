#include "mac/metrics.hpp"

#include "mac/algorithms.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace mac {

QoSReport analyze(const Trace& trace) {
    QoSReport rep;
    rep.n = trace.config.n;
    rep.horizon = trace.horizon();

    std::unordered_map<std::uint64_t, Round> open;  // injected, not yet heard
    // Per-station FIFO bookkeeping for pending waits: the round at which the
    // station's previous packet was heard bounds when the next became pending.
    std::vector<Round> prev_heard(static_cast<size_t>(trace.config.n) + 1, 0);
    std::int64_t injected = 0, heard = 0;
    // Packet ids are assigned in injection order: stations ascending within a
    // round, rounds ascending. Rebuild them to know each packet's origin.
    std::uint64_t next_id = 1;
    std::vector<std::deque<std::uint64_t>> fifo(static_cast<size_t>(trace.config.n) + 1);
    for (const RoundRecord& rec : trace.records) {
        for (const auto& [station, count] : rec.injections)
            for (int k = 0; k < count; ++k) {
                open.emplace(next_id, rec.round);
                fifo[static_cast<size_t>(station)].push_back(next_id);
                ++next_id;
                ++injected;
            }
        if (rec.heard_real_packet()) {
            ++heard;
            rep.max_latency = std::max(rep.max_latency, rec.round - rec.heard->injected_round);
            rep.max_exclusive_delay =
                std::max(rep.max_exclusive_delay, rec.round - rec.heard->injected_round - 1);
            open.erase(rec.heard->id);
            const auto st = static_cast<size_t>(rec.heard->injected_station);
            const Round became_pending =
                std::max(rec.heard->injected_round, prev_heard[st]);
            rep.max_pending_wait = std::max(rep.max_pending_wait, rec.round - became_pending);
            prev_heard[st] = rec.round;
            if (!fifo[st].empty() && fifo[st].front() == rec.heard->id) fifo[st].pop_front();
        }
        if (rec.void_round()) ++rep.void_rounds;
        if (rec.transmitters.size() >= 2) ++rep.collision_rounds;
        const int stored = rec.total_stored();
        rep.max_stored = std::max(rep.max_stored, stored);
        if (injected - heard != stored)
            throw ConservationError(rec.round, injected, heard, stored);
    }
    // Packets still waiting at the horizon keep accruing pending wait: the
    // head of each station's FIFO has been pending since it reached the front.
    for (size_t st = 1; st < fifo.size(); ++st) {
        if (fifo[st].empty()) continue;
        const Round became_pending =
            std::max(open.at(fifo[st].front()), prev_heard[st]);
        rep.max_pending_wait = std::max(rep.max_pending_wait, rep.horizon - became_pending);
    }
    rep.injected = injected;
    rep.heard = heard;
    rep.unheard = static_cast<std::int64_t>(open.size());
    for (const auto& [id, r] : open) rep.unheard_ids.push_back(id);
    std::sort(rep.unheard_ids.begin(), rep.unheard_ids.end());
    rep.throughput = rep.horizon > 0 ? static_cast<double>(heard) / rep.horizon : 0.0;
    return rep;
}

std::string QoSReport::to_text() const {
    std::ostringstream os;
    os << "n=" << n << "\n"
       << "horizon=" << horizon << "\n"
       << "injected=" << injected << "\n"
       << "heard=" << heard << "\n"
       << "max_stored=" << max_stored << "\n"
       << "max_latency=" << max_latency << "\n"
       << "max_exclusive_delay=" << max_exclusive_delay << "\n"
       << "max_pending_wait=" << max_pending_wait << "\n"
       << "unheard=" << unheard << "\n"
       << "void_rounds=" << void_rounds << "\n"
       << "collision_rounds=" << collision_rounds << "\n"
       << "throughput=" << throughput << "\n";
    return os.str();
}

std::string QoSReport::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["horizon"] = horizon;
    j["injected"] = injected;
    j["heard"] = heard;
    j["max_stored"] = max_stored;
    j["max_latency"] = max_latency;
    j["max_exclusive_delay"] = max_exclusive_delay;
    j["max_pending_wait"] = max_pending_wait;
    j["unheard"] = unheard;
    j["unheard_ids"] = unheard_ids;
    j["void_rounds"] = void_rounds;
    j["collision_rounds"] = collision_rounds;
    j["throughput"] = throughput;
    return j.dump(2);
}

std::string Bound::describe() const {
    std::ostringstream os;
    os << name << ": " << quantity << (lower_bound ? " >= " : " <= ") << allowed;
    return os.str();
}

std::string BoundCheck::describe() const {
    std::ostringstream os;
    os << (pass ? "pass" : "FAIL") << " " << bound.describe() << " (observed " << observed
       << ")";
    return os.str();
}

BoundCheck check_bound(const QoSReport& report, const Bound& bound) {
    BoundCheck c;
    c.bound = bound;
    if (bound.quantity == "max_stored")
        c.observed = report.max_stored;
    else if (bound.quantity == "max_latency")
        c.observed = report.max_latency;
    else if (bound.quantity == "max_exclusive_delay")
        c.observed = report.max_exclusive_delay;
    else if (bound.quantity == "max_pending_wait")
        c.observed = report.max_pending_wait;
    else
        throw std::invalid_argument("unknown bound quantity: " + bound.quantity);
    c.pass = bound.lower_bound ? c.observed >= bound.allowed : c.observed <= bound.allowed;
    return c;
}

Bound bound_mbtf_stored(int n, std::int64_t b) {
    return {"move-big-to-front storage", "max_stored",
            2 * (static_cast<std::int64_t>(n) * n + b), false};
}
Bound bound_two_adaptive_stored(std::int64_t b) {
    return {"two-station token storage", "max_stored", b + 2, false};
}
Bound bound_two_fs_latency(std::int64_t w) {
    return {"two-station full-sensing latency", "max_latency", 4 * w, false};
}
Bound bound_three_window_latency(std::int64_t w) {
    return {"three-station fixed-window latency", "max_latency", 2 * w + 1, false};
}
Bound bound_three_col_det_latency(std::int64_t w) {
    return {"three-station collision-detection latency", "max_latency", 5 * w - 1, false};
}
Bound bound_three_plain_latency(std::int64_t w) {
    return {"three-station latency", "max_latency", 6 * w - 1, false};
}
Bound bound_centralized_delay(std::int64_t b) {
    return {"centralized delay", "max_exclusive_delay", b + 1, false};
}
Bound bound_ack_primes_latency(int n) {
    return {"prime-schedule pending wait", "max_pending_wait",
            ack_primes_schedule(n).fairness_bound, false};
}
Bound bound_omega_n2_stored(int n) {
    const std::int64_t h = n / 2 - 1;
    return {"forced-congestion storage", "max_stored", h * h, true};
}

}  // namespace mac
