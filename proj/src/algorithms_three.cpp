#include "mac/algorithms.hpp"

#include <stdexcept>

namespace mac {

namespace {

// Control payload for the three-station family: "s<sender>|<flags>" with
// flags O (handing over), A0/A1 (closer's availability bit), D (collision
// marker forced onto the phase's last round), U (bare hand-over while
// unloading without packets).
struct ThreeBits {
    StationId sender = 0;
    bool over = false;
    bool avail_bit = false;
    bool is_close = false;  // message carried an A-flag
};

std::string encode_bits(StationId sender, const char* flags) {
    std::string s = "s";
    s += static_cast<char>('0' + sender);
    s += '|';
    s += flags;
    return s;
}

std::optional<ThreeBits> decode_bits(const std::string& control) {
    if (control.size() < 2 || control[0] != 's') return std::nullopt;
    ThreeBits b;
    b.sender = control[1] - '0';
    for (size_t i = 3; i < control.size(); ++i) {
        if (control[i] == 'O' || control[i] == 'U') b.over = true;
        if (control[i] == 'A') {
            b.is_close = true;
            if (i + 1 < control.size()) b.avail_bit = control[i + 1] == '1';
        }
    }
    return b;
}

/// Three-station window protocol with phases of `param` rounds (the first
/// phase has one extra warm-up round). Within a phase the service order is
/// cyclic from the previous closer: the closer unloads first when it
/// announced packets, then its successor, then the third station, takeovers
/// signalled by "over" bits or one silent round. A station whose available
/// count exactly fills the remaining rounds cuts in and owns the rest of the
/// phase. Availability is cumulative: whatever a phase fails to drain stays
/// available, so overloads either drain later or collide and escalate.
class ThreeAdaptiveStation final : public StationAutomaton {
public:
    enum class Variant { Fixed, ColDet, Plain };

    ThreeAdaptiveStation(StationId name, int window, Variant variant)
        : StationAutomaton(
              name, {AlgorithmClass::Kind::Adaptive, false, false,
                     variant == Variant::ColDet}),
          variant_(variant),
          param_(window) {
        if (window < 1) throw std::invalid_argument("window must be >= 1");
        reset_phase_flags();
    }

    std::optional<Message> decide() override {
        if (mode_ == Mode::Unload) {
            if (unloader_ != name_) return std::nullopt;
            if (old_left_ == 0) return Message{std::nullopt, encode_bits(name_, "U")};
            return Message{pending_, old_left_ == 1 ? encode_bits(name_, "O")
                                                    : encode_bits(name_, "")};
        }
        if (first_phase_) {
            // Warm-up: everyone pauses, station 1 closes with its status bit.
            if (pos_ == param_ && name_ == 1)
                return Message{std::nullopt, encode_bits(name_, accum_ >= 1 ? "A1" : "A0")};
            return std::nullopt;
        }
        const int last = param_ - 1;
        if (stopped_) {
            if (pos_ == last && poisoned_)
                return Message{std::nullopt, encode_bits(name_, "D")};
            return std::nullopt;
        }
        const bool my_go =
            (name_ == opener_ && opener_has_avail_ && pos_ == 0) ||
            (name_ == gprime() && gprime_go_ == pos_) ||
            (name_ == gsecond() && gsecond_go_ == pos_);
        const bool cut_in = (name_ == gprime() || name_ == gsecond()) && !started_ &&
                            avail_ == param_ - pos_;
        if (avail_ >= 1 && (started_ || my_go || cut_in))
            return Message{pending_, pos_ == last ? close_bits(true) : mid_bits()};
        if (pos_ == last) {
            if (name_ == gsecond() && avail_ == 0 && close_duty_mine())
                return Message{std::nullopt, close_bits(false)};
            if (poisoned_)
                return Message{std::nullopt, encode_bits(name_, "D")};
        }
        return std::nullopt;
    }

    void transition(const Feedback& fb, const std::optional<Message>& own,
                    std::span<const Packet> injected) override {
        const bool collided = own.has_value() && !fb.heard();
        standard_packet_step(fb, own, injected);
        const int count = static_cast<int>(injected.size());

        if (mode_ == Mode::Unload) {
            delay_.push_back(count);
            if (own && own->packet && fb.heard() && old_left_ > 0) --old_left_;
            if (fb.heard()) {
                const auto bits = decode_bits(fb.message->control);
                if (bits && bits->over && bits->sender == unloader_) {
                    if (++unloader_ > 3) begin_run();
                }
            }
            return;
        }

        if (variant_ == Variant::ColDet && fb.kind == FeedbackKind::Collision) {
            escalate();
            return;
        }
        if (variant_ == Variant::Plain && collided) {
            poisoned_ = true;
            // The cutting-in station keeps the floor and repeats; the station
            // it ran into stops for the rest of the phase.
            if (streak_begin_ != pos_) stopped_ = true;
        }

        std::int64_t rec;
        if (!delay_.empty()) {
            delay_.push_back(count);
            rec = delay_.front();
            delay_.pop_front();
        } else {
            rec = count;
        }

        if (own && own->packet && fb.heard() && avail_ > 0) --avail_;
        if (own && !started_) {
            started_ = true;
            streak_begin_ = pos_;
        }

        std::optional<ThreeBits> bits;
        if (fb.heard()) bits = decode_bits(fb.message->control);
        if (bits) {
            heard_at_ = pos_;
            heard_over_ = bits->over;
            if (bits->sender == gprime()) gprime_seen_ = true;
            if (bits->over) {
                if (bits->sender == opener_) gprime_go_ = pos_ + 1;
                else if (bits->sender == gprime()) gsecond_go_ = pos_ + 1;
            }
        } else if (!first_phase_ && gprime_go_ >= 0 && pos_ >= gprime_go_) {
            gprime_seen_ = true;  // a silent round at or past its slot: it is empty
            if (gsecond_go_ < 0) gsecond_go_ = pos_ + 1;
        }

        const int phase_len = first_phase_ ? param_ + 1 : param_;
        if (pos_ == phase_len - 1) {
            if (variant_ == Variant::Plain && !fb.heard()) {
                // Silence where the closer's status was due: every station
                // reads this as a collision having poisoned the phase.
                escalate();
                return;
            }
            if (bits && bits->is_close) {
                opener_ = bits->sender;
                opener_has_avail_ = bits->avail_bit;
            } else {
                opener_ = gsecond();
                opener_has_avail_ = false;
            }
            avail_ += accum_;
            accum_ = rec;
            first_phase_ = false;
            pos_ = 0;
            reset_phase_flags();
        } else {
            accum_ += rec;
            ++pos_;
        }
    }

    std::unique_ptr<StationAutomaton> clone(CloneContext&) const override {
        return std::make_unique<ThreeAdaptiveStation>(*this);
    }

    int current_window() const { return param_; }

private:
    enum class Mode { Run, Unload };

    StationId gprime() const { return opener_ % 3 + 1; }
    StationId gsecond() const { return gprime() % 3 + 1; }

    std::string mid_bits() const {
        return encode_bits(name_, avail_ == 1 ? "O" : "");
    }
    std::string close_bits(bool sending_packet) const {
        const std::int64_t next = avail_ - (sending_packet ? 1 : 0) + accum_;
        return encode_bits(name_, next >= 1 ? "A1" : "A0");
    }

    /// The empty default closer speaks only when no running streak owns the
    /// last round and the middle station's emptiness has been established;
    /// otherwise it yields to a possible cut-in it cannot see.
    bool close_duty_mine() const {
        if (heard_at_ == param_ - 2 && !heard_over_) return false;
        return gprime_seen_;
    }

    void reset_phase_flags() {
        gprime_go_ = (!first_phase_ && !opener_has_avail_) ? 0 : -1;
        gsecond_go_ = -1;
        heard_at_ = -2;
        heard_over_ = false;
        gprime_seen_ = false;
        started_ = false;
        streak_begin_ = -1;
        stopped_ = false;
        poisoned_ = false;
    }

    void escalate() {
        mode_ = Mode::Unload;
        ++param_;
        old_left_ = stored_count();
        delay_.clear();
        avail_ = 0;
        accum_ = 0;
        unloader_ = 1;
    }

    void begin_run() {
        int consumed = 0;
        while (consumed < param_ && !delay_.empty()) {
            accum_ += delay_.front();
            delay_.pop_front();
            ++consumed;
        }
        mode_ = Mode::Run;
        first_phase_ = true;
        pos_ = consumed;
        avail_ = 0;
        opener_ = 1;
        opener_has_avail_ = false;
        reset_phase_flags();
    }

    Variant variant_;
    int param_;
    Mode mode_ = Mode::Run;

    bool first_phase_ = true;
    int pos_ = 0;
    StationId opener_ = 1;
    bool opener_has_avail_ = false;

    int gprime_go_ = -1;    // position where the middle station may start
    int gsecond_go_ = -1;   // position where the default closer may start
    int heard_at_ = -2;
    bool heard_over_ = false;
    bool gprime_seen_ = false;
    bool started_ = false;
    int streak_begin_ = -1;
    bool stopped_ = false;
    bool poisoned_ = false;

    std::int64_t avail_ = 0;
    std::int64_t accum_ = 0;
    std::deque<int> delay_;

    StationId unloader_ = 1;
    std::int64_t old_left_ = 0;
};

StationSet make_three(int window, ThreeAdaptiveStation::Variant v) {
    StationSet set;
    for (StationId s = 1; s <= 3; ++s)
        set.push_back(std::make_unique<ThreeAdaptiveStation>(s, window, v));
    return set;
}

}  // namespace

StationSet three_adaptive_window(int i) {
    return make_three(i, ThreeAdaptiveStation::Variant::Fixed);
}

StationSet three_adaptive_col_det() {
    return make_three(1, ThreeAdaptiveStation::Variant::ColDet);
}

StationSet three_adaptive() {
    return make_three(1, ThreeAdaptiveStation::Variant::Plain);
}

}  // namespace mac
