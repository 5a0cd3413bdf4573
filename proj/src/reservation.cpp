#include "mac/algorithms.hpp"

#include <stdexcept>

namespace mac {

namespace {

constexpr std::uint64_t kDummyIdBase = 1ull << 62;

std::string encode_res(StationId sender, int action) {
    std::string s = "R";
    s += action > 0 ? '+' : (action < 0 ? '-' : '0');
    s += static_cast<char>('0' + sender);
    s += ';';
    return s;
}

}  // namespace

std::optional<std::pair<StationId, int>> parse_reservation_bits(const std::string& control) {
    if (control.size() < 4 || control[0] != 'R') return std::nullopt;
    int action = control[1] == '+' ? 1 : (control[1] == '-' ? -1 : 0);
    return std::make_pair<StationId, int>(control[2] - '0', std::move(action));
}

/// Wraps a queue-size-oblivious protocol so that the result is retaining: the
/// inner protocol runs only at regular rounds, while a station that transmits
/// with a nonempty queue reserves the second currently-unreserved future
/// round for one extra transmission of its own. All stations keep identical
/// reservation arrays, updated only from heard messages.
class ReservationWrapped final : public StationAutomaton {
public:
    ReservationWrapped(std::unique_ptr<StationAutomaton> inner, int n)
        : StationAutomaton(inner->name(),
                           {AlgorithmClass::Kind::Adaptive, false, false,
                            inner->algorithm_class().requires_collision_detection}),
          inner_(std::move(inner)),
          reserved_round_(static_cast<size_t>(n) + 1, 0) {}

    std::optional<Message> decide() override {
        const StationId owner = reserved_by(round_now_);
        if (owner == name_) {
            if (!inner_->pending_)
                throw std::logic_error("reserved round without a pending packet");
            return Message{inner_->pending_, encode_res(name_, action_wanted())};
        }
        if (owner != 0) return std::nullopt;
        auto msg = inner_->decide();
        if (msg && !msg->empty()) {
            msg->control = encode_res(name_, action_wanted()) + msg->control;
            return msg;
        }
        return std::nullopt;
    }

    void transition(const Feedback& fb, const std::optional<Message>& own,
                    std::span<const Packet> injected) override {
        const StationId owner = reserved_by(round_now_);

        if (owner != 0) {
            // A reserved round: the inner protocol stays frozen, arrivals wait
            // in the side buffer, and the reserving station replaces its
            // pending packet.
            for (const Packet& p : injected) buffer_.push_back(p);
            if (owner == name_ && own && fb.heard()) {
                if (own->packet->dummy) {
                    inner_->pending_.reset();  // a heard dummy is not replaced
                } else {
                    inner_->pending_.reset();
                    if (!inner_->queue_.empty()) {
                        inner_->pending_ = inner_->queue_.front();
                        inner_->queue_.pop_front();
                    } else if (!buffer_.empty()) {
                        inner_->pending_ = buffer_.front();
                        buffer_.pop_front();
                    } else {
                        inner_->pending_ =
                            Packet{kDummyIdBase + (static_cast<std::uint64_t>(name_) << 32) +
                                       dummy_serial_++,
                                   round_now_, name_, true};
                    }
                }
            }
        } else {
            // Regular round: drain the buffer as if injected now, then run the
            // inner transition on the message with reservation bits stripped.
            std::vector<Packet> arriving(buffer_.begin(), buffer_.end());
            buffer_.clear();
            arriving.insert(arriving.end(), injected.begin(), injected.end());
            inner_->transition(strip(fb), strip_own(own), arriving);
        }

        if (fb.heard()) {
            if (auto bits = parse_reservation_bits(fb.message->control)) {
                auto [sender, action] = *bits;
                reserved_round_[static_cast<size_t>(sender)] = 0;
                if (action > 0)
                    reserved_round_[static_cast<size_t>(sender)] = second_available();
            }
        }

        // A dummy pending packet gives way to a real one as soon as any is on
        // hand.
        if (inner_->pending_ && inner_->pending_->dummy) {
            if (!inner_->queue_.empty()) {
                inner_->pending_ = inner_->queue_.front();
                inner_->queue_.pop_front();
            } else if (owner != 0 && !buffer_.empty()) {
                inner_->pending_ = buffer_.front();
                buffer_.pop_front();
            }
        }

        for (auto& r : reserved_round_)
            if (r == round_now_) r = 0;  // consumed
        ++round_now_;
    }

    std::unique_ptr<StationAutomaton> clone(CloneContext& ctx) const override {
        auto copy = std::make_unique<ReservationWrapped>(
            inner_->clone(ctx), static_cast<int>(reserved_round_.size()) - 1);
        copy->buffer_ = buffer_;
        copy->reserved_round_ = reserved_round_;
        copy->round_now_ = round_now_;
        copy->dummy_serial_ = dummy_serial_;
        return copy;
    }

    int stored_count() const override {
        return inner_->stored_count() + static_cast<int>(buffer_.size());
    }
    const std::optional<Packet>& pending() const override { return inner_->pending(); }
    const std::deque<Packet>& queue() const override { return inner_->queue(); }

    Round next_regular_gap_bound() const {
        return static_cast<Round>(reserved_round_.size()) + 1;
    }

private:
    StationId reserved_by(Round r) const {
        for (size_t s = 1; s < reserved_round_.size(); ++s)
            if (reserved_round_[s] == r) return static_cast<StationId>(s);
        return 0;
    }

    /// First two future rounds not on the reservation record; the second one
    /// is what a new reservation takes, so the earliest free round always
    /// stays free.
    Round second_available() const {
        int found = 0;
        for (Round r = round_now_ + 1;; ++r) {
            if (reserved_by(r) != 0) continue;
            if (++found == 2) return r;
        }
    }

    /// +1 reserve (queue nonempty), -1 cancel (queue empty, a future round on
    /// record), 0 neither.
    int action_wanted() const {
        if (!inner_->queue_.empty()) return 1;
        if (reserved_round_[static_cast<size_t>(name_)] > round_now_) return -1;
        return 0;
    }

    static Feedback strip(const Feedback& fb) {
        if (!fb.heard()) return fb;
        Message m = *fb.message;
        if (auto pos = m.control.find(';'); pos != std::string::npos)
            m.control = m.control.substr(pos + 1);
        return Feedback{FeedbackKind::Heard, std::move(m)};
    }

    static std::optional<Message> strip_own(const std::optional<Message>& own) {
        if (!own) return std::nullopt;
        Message m = *own;
        if (auto pos = m.control.find(';'); pos != std::string::npos)
            m.control = m.control.substr(pos + 1);
        return m;
    }

    std::unique_ptr<StationAutomaton> inner_;
    std::deque<Packet> buffer_;
    std::vector<Round> reserved_round_;  // index = station, 0 = none
    Round round_now_ = 1;
    std::uint64_t dummy_serial_ = 0;
};

StationSet reservation_wrap(StationSet inner) {
    if (inner.empty()) throw std::invalid_argument("reservation_wrap: empty station set");
    for (const auto& st : inner)
        if (!st->algorithm_class().queue_size_oblivious)
            throw std::invalid_argument(
                "reservation_wrap: inner protocol must be declared queue-size oblivious");
    const int n = static_cast<int>(inner.size());
    StationSet wrapped;
    for (auto& st : inner)
        wrapped.push_back(std::make_unique<ReservationWrapped>(std::move(st), n));
    return wrapped;
}

}  // namespace mac
