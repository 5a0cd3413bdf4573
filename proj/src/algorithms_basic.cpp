#include "mac/algorithms.hpp"

#include <cmath>
#include <stdexcept>

namespace mac {

namespace {

// --------------------------------------------------------------- round robin

class RoundRobinStation final : public StationAutomaton {
public:
    RoundRobinStation(StationId name, int n)
        : StationAutomaton(name, {AlgorithmClass::Kind::FullSensing, false, true, false}),
          n_(n) {}

    std::optional<Message> decide() override {
        if (pending_ && next_round_ % n_ == name_ % n_)
            return Message{pending_, ""};
        return std::nullopt;
    }

    void transition(const Feedback& fb, const std::optional<Message>& own,
                    std::span<const Packet> injected) override {
        standard_packet_step(fb, own, injected);
        ++next_round_;
    }

    std::unique_ptr<StationAutomaton> clone(CloneContext&) const override {
        return std::make_unique<RoundRobinStation>(*this);
    }

private:
    int n_;
    Round next_round_ = 1;
};

// ------------------------------------------------------ ack-based automata

/// Transmission-sequence automaton: the decision depends only on how many
/// rounds have been spent on the current packet.
class TransmissionSequenceStation : public StationAutomaton {
public:
    TransmissionSequenceStation(StationId name)
        : StationAutomaton(name, {AlgorithmClass::Kind::AckBased, false, true, false}) {}

    std::optional<Message> decide() final {
        if (pending_ && sequence_bit(rounds_on_current_)) return Message{pending_, ""};
        return std::nullopt;
    }

    void transition(const Feedback& fb, const std::optional<Message>& own,
                    std::span<const Packet> injected) final {
        const auto before = pending_ ? std::optional(pending_->id) : std::nullopt;
        standard_packet_step(fb, own, injected);
        const auto after = pending_ ? std::optional(pending_->id) : std::nullopt;
        if (!after)
            rounds_on_current_ = 0;
        else if (after != before)
            rounds_on_current_ = 1;  // new packet: next round is its first
        else
            ++rounds_on_current_;
    }

    std::int64_t rounds_on_current() const { return rounds_on_current_; }

protected:
    /// Whether position k (1-based) of the transmission sequence is a 1.
    virtual bool sequence_bit(std::int64_t k) const = 0;

private:
    std::int64_t rounds_on_current_ = 0;  // 0 while no packet is pending
};

class AllOnesStation final : public TransmissionSequenceStation {
public:
    using TransmissionSequenceStation::TransmissionSequenceStation;
    std::unique_ptr<StationAutomaton> clone(CloneContext&) const override {
        return std::make_unique<AllOnesStation>(*this);
    }

protected:
    bool sequence_bit(std::int64_t) const override { return true; }
};

class PrimeScheduleStation final : public TransmissionSequenceStation {
public:
    PrimeScheduleStation(StationId name, std::int64_t base, std::int64_t prime)
        : TransmissionSequenceStation(name), base_(base), prime_(prime) {}

    std::unique_ptr<StationAutomaton> clone(CloneContext&) const override {
        return std::make_unique<PrimeScheduleStation>(*this);
    }

protected:
    bool sequence_bit(std::int64_t k) const override {
        return k >= base_ && (k - base_) % prime_ == 0;
    }

private:
    std::int64_t base_;
    std::int64_t prime_;
};

// ------------------------------------------------------------- centralized

struct CentralController {
    int n = 0;
    std::deque<StationId> tokens;         // FIFO of station-labelled tokens
    std::optional<StationId> designated;  // station told to transmit next round
    std::vector<int> reports_prev;        // injection counts of the previous round
    std::vector<int> reports_cur;         // being collected this round
};

class CentralizedStation final : public StationAutomaton {
public:
    CentralizedStation(StationId name, std::shared_ptr<CentralController> cpu)
        : StationAutomaton(name, {AlgorithmClass::Kind::Adaptive, false, false, false}),
          cpu_(std::move(cpu)) {}

    std::optional<Message> decide() override {
        if (cpu_->designated == name_) {
            if (!pending_)
                throw std::logic_error(
                    "centralized: station " + std::to_string(name_) +
                    " designated to transmit with no packet");
            return Message{pending_, ""};
        }
        return std::nullopt;
    }

    void transition(const Feedback& fb, const std::optional<Message>& own,
                    std::span<const Packet> injected) override {
        standard_packet_step(fb, own, injected);
        cpu_->reports_cur[static_cast<size_t>(name_ - 1)] = static_cast<int>(injected.size());
        if (name_ == cpu_->n) {
            // All stations have reported; the controller now enqueues one
            // token per packet injected last round and designates the next
            // transmitter, to take effect at the next round.
            for (StationId s = 1; s <= cpu_->n; ++s)
                for (int k = 0; k < cpu_->reports_prev[static_cast<size_t>(s - 1)]; ++k)
                    cpu_->tokens.push_back(s);
            if (cpu_->tokens.empty()) {
                cpu_->designated.reset();
            } else {
                cpu_->designated = cpu_->tokens.front();
                cpu_->tokens.pop_front();
            }
            cpu_->reports_prev = cpu_->reports_cur;
            cpu_->reports_cur.assign(static_cast<size_t>(cpu_->n), 0);
        }
    }

    std::unique_ptr<StationAutomaton> clone(CloneContext& ctx) const override {
        auto copy = std::make_unique<CentralizedStation>(*this);
        copy->cpu_ = ctx.share(cpu_);
        return copy;
    }

private:
    std::shared_ptr<CentralController> cpu_;
};

// ------------------------------------------------------------- token cycle

class TokenCycleStation final : public StationAutomaton {
public:
    TokenCycleStation(StationId name, int n)
        : StationAutomaton(name, {AlgorithmClass::Kind::Adaptive, true, true, false}),
          n_(n) {}

    std::optional<Message> decide() override {
        if (holder_ == name_ && pending_)
            return Message{pending_, queue_.empty() ? "O" : ""};
        return std::nullopt;
    }

    void transition(const Feedback& fb, const std::optional<Message>& own,
                    std::span<const Packet> injected) override {
        standard_packet_step(fb, own, injected);
        if (fb.heard()) {
            if (fb.message->control == "O") holder_ = holder_ % n_ + 1;
        } else {
            holder_ = holder_ % n_ + 1;  // a silent round hands the token over
        }
    }

    std::unique_ptr<StationAutomaton> clone(CloneContext&) const override {
        return std::make_unique<TokenCycleStation>(*this);
    }

private:
    int n_;
    StationId holder_ = 1;
};

// ------------------------------------------------------- move big to front

class MoveBigToFrontStation final : public StationAutomaton {
public:
    MoveBigToFrontStation(StationId name, int n)
        : StationAutomaton(name, {AlgorithmClass::Kind::Adaptive, false, false, false}),
          n_(n) {
        for (StationId s = 1; s <= n; ++s) list_.push_back(s);
    }

    std::optional<Message> decide() override {
        if (list_[static_cast<size_t>(token_pos_)] == name_ && pending_)
            return Message{pending_, stored_count() >= n_ ? "B" : ""};
        return std::nullopt;
    }

    void transition(const Feedback& fb, const std::optional<Message>& own,
                    std::span<const Packet> injected) override {
        standard_packet_step(fb, own, injected);
        if (fb.heard() && fb.message->control == "B") {
            // The holder announced big status: move it to the front of the
            // list; it keeps the token there.
            const StationId holder = list_[static_cast<size_t>(token_pos_)];
            list_.erase(list_.begin() + token_pos_);
            list_.insert(list_.begin(), holder);
            token_pos_ = 0;
        } else {
            token_pos_ = (token_pos_ + 1) % n_;
        }
    }

    std::unique_ptr<StationAutomaton> clone(CloneContext&) const override {
        return std::make_unique<MoveBigToFrontStation>(*this);
    }

    const std::vector<StationId>& station_list() const { return list_; }

private:
    int n_;
    std::vector<StationId> list_;
    int token_pos_ = 0;
};

std::vector<std::int64_t> primes_up_to(std::int64_t limit) {
    std::vector<bool> sieve(static_cast<size_t>(limit + 1), true);
    std::vector<std::int64_t> primes;
    for (std::int64_t v = 2; v <= limit; ++v) {
        if (!sieve[static_cast<size_t>(v)]) continue;
        primes.push_back(v);
        for (std::int64_t m = v * v; m <= limit; m += v) sieve[static_cast<size_t>(m)] = false;
    }
    return primes;
}

}  // namespace

StationSet round_robin(int n) {
    if (n < 1) throw std::invalid_argument("round_robin: n must be >= 1");
    StationSet set;
    for (StationId s = 1; s <= n; ++s)
        set.push_back(std::make_unique<RoundRobinStation>(s, n));
    return set;
}

StationSet all_ones(int n) {
    if (n < 1) throw std::invalid_argument("all_ones: n must be >= 1");
    StationSet set;
    for (StationId s = 1; s <= n; ++s)
        set.push_back(std::make_unique<AllOnesStation>(s));
    return set;
}

AckPrimesSchedule ack_primes_schedule(int n) {
    if (n < 1) throw std::invalid_argument("ack_primes: n must be >= 1");
    AckPrimesSchedule sched;
    sched.m = std::max(n, 21);
    const double m = sched.m;
    const double lo = m * std::log(m);
    const double hi = 3.0 * m * std::log(m);
    sched.base = static_cast<std::int64_t>(std::ceil(3.0 * m * m * std::log(m)));
    sched.fairness_bound = static_cast<std::int64_t>(std::ceil(6.0 * m * m * std::log(m)));
    for (std::int64_t v : primes_up_to(static_cast<std::int64_t>(hi) + 1)) {
        if (static_cast<double>(v) >= lo && static_cast<double>(v) < hi)
            sched.primes.push_back(v);
        if (static_cast<std::int64_t>(sched.primes.size()) == sched.m) break;
    }
    if (static_cast<int>(sched.primes.size()) < sched.m)
        throw std::logic_error("ack_primes: prime range exhausted");
    return sched;
}

StationSet ack_primes(int n) {
    const AckPrimesSchedule sched = ack_primes_schedule(n);
    StationSet set;
    for (StationId s = 1; s <= n; ++s)
        set.push_back(std::make_unique<PrimeScheduleStation>(
            s, sched.base, sched.primes[static_cast<size_t>(s - 1)]));
    return set;
}

StationSet centralized(int n) {
    if (n < 1) throw std::invalid_argument("centralized: n must be >= 1");
    auto cpu = std::make_shared<CentralController>();
    cpu->n = n;
    cpu->reports_prev.assign(static_cast<size_t>(n), 0);
    cpu->reports_cur.assign(static_cast<size_t>(n), 0);
    StationSet set;
    for (StationId s = 1; s <= n; ++s)
        set.push_back(std::make_unique<CentralizedStation>(s, cpu));
    return set;
}

StationSet token_cycle(int n) {
    if (n < 1) throw std::invalid_argument("token_cycle: n must be >= 1");
    StationSet set;
    for (StationId s = 1; s <= n; ++s)
        set.push_back(std::make_unique<TokenCycleStation>(s, n));
    return set;
}

StationSet two_adaptive() { return token_cycle(2); }

StationSet move_big_to_front(int n) {
    if (n < 1) throw std::invalid_argument("move_big_to_front: n must be >= 1");
    StationSet set;
    for (StationId s = 1; s <= n; ++s)
        set.push_back(std::make_unique<MoveBigToFrontStation>(s, n));
    return set;
}

}  // namespace mac
