#include "mac/algorithms.hpp"

#include <algorithm>
#include <stdexcept>

namespace mac {

namespace {

/// Two-station fixed-window phase protocol, plus the escalating variant that
/// bumps the window on every collision after unloading all queued packets.
///
/// Phases have exactly `param` rounds. Arrivals recorded during one phase
/// become the next phase's transmission quota, spent oldest-packet-first:
/// station 1 spends its quota from the first round; station 2 cuts in the
/// moment its quota equals the number of rounds left (covering the
/// whole-phase case and letting full phases run back to back). Quotas are
/// window-bounded, so collisions happen only while the window parameter is
/// still too small, and each one escalates it after both stations unload
/// everything they hold.
///
/// Backlog beyond the quota flow (arrivals that piled up while the parameter
/// was too small) drains through provably idle rounds: after a phase's first
/// silence station 2 may keep transmitting until empty, after the second
/// silence station 1 may do the same. Every transmission slot is given up
/// for good, within the phase, on the first round it leaves the channel
/// idle, so these catch-up streaks never collide with anything.
class TwoFullSensingStation final : public StationAutomaton {
public:
    TwoFullSensingStation(StationId name, int initial_window, bool escalates)
        : StationAutomaton(name, {AlgorithmClass::Kind::FullSensing, false, false, false}),
          escalates_(escalates),
          param_(initial_window) {
        if (initial_window < 1) throw std::invalid_argument("window must be >= 1");
    }

    std::optional<Message> decide() override {
        switch (mode_) {
            case Mode::UnloadFirst:
                if (name_ == 1 && old_left_ > 0) return Message{pending_, ""};
                return std::nullopt;
            case Mode::UnloadSecond:
                if (name_ == 2 && old_left_ > 0) return Message{pending_, ""};
                return std::nullopt;
            case Mode::Run:
                break;
        }
        if (first_phase_ || !pending_) return std::nullopt;
        if (opening_eligible() || exact_fit_eligible() || catchup_eligible())
            return Message{pending_, ""};
        return std::nullopt;
    }

    void transition(const Feedback& fb, const std::optional<Message>& own,
                    std::span<const Packet> injected) override {
        const bool collided = own.has_value() && !fb.heard();
        const bool opening = opening_eligible();
        const bool exact = exact_fit_eligible();
        const bool catching = catchup_eligible();
        standard_packet_step(fb, own, injected);
        const int count = static_cast<int>(injected.size());

        if (mode_ == Mode::UnloadFirst || mode_ == Mode::UnloadSecond) {
            delay_.push_back(count);
            const bool mine = (mode_ == Mode::UnloadFirst) == (name_ == 1);
            if (mine && own && fb.heard()) --old_left_;
            if (fb.kind == FeedbackKind::Silence) {
                if (mode_ == Mode::UnloadFirst)
                    mode_ = Mode::UnloadSecond;
                else
                    begin_run();
            }
            return;
        }

        if (collided && escalates_) {
            // Both stations transmitted and nothing was heard; every packet on
            // hand (including this round's arrivals) becomes old and the next
            // window size takes over once the old packets are unloaded.
            ++param_;
            old_left_ = stored_count();
            delay_.clear();
            quota_ = accum_ = 0;
            mode_ = Mode::UnloadFirst;
            return;
        }

        if (own && fb.heard() && quota_ > 0) --quota_;
        if (!own) {
            // A slot that could have spoken and stayed idle is given up until
            // the next phase.
            if (name_ == 1 && !opening_dead_) opening_dead_ = true;
            if (exact) exact_dead_ = true;
            if (catching) catchup_dead_ = true;
        }
        accum_ += count;
        if (fb.kind == FeedbackKind::Silence) {
            ++silences_;
            if (silences_ == my_silence_index()) catchup_from_ = pos_ + 1;
        }

        if (++pos_ == param_) start_phase();
    }

    std::unique_ptr<StationAutomaton> clone(CloneContext&) const override {
        return std::make_unique<TwoFullSensingStation>(*this);
    }

    std::string debug_state() const override {
        std::string s = "i=" + std::to_string(param_) + " pos=" + std::to_string(pos_) +
                        " q=" + std::to_string(quota_) + " a=" + std::to_string(accum_) +
                        " sil=" + std::to_string(silences_);
        if (mode_ != Mode::Run) s += " UNLOAD";
        if (first_phase_) s += " warmup";
        if (opening_eligible()) s += " open";
        if (exact_fit_eligible()) s += " exact";
        if (catchup_eligible()) s += " catchup";
        return s;
    }

    int current_window() const { return param_; }

private:
    enum class Mode { Run, UnloadFirst, UnloadSecond };

    // One station owns the rounds after the phase's first silence, the other
    // after the second; priority alternates with the phase parity so a
    // one-sided backlog cannot starve.
    int my_silence_index() const {
        const bool second_first = phase_index_ % 2 == 0;
        return (name_ == 2) == second_first ? 1 : 2;
    }

    bool opening_eligible() const {
        return name_ == 1 && mode_ == Mode::Run && !first_phase_ && !opening_dead_ &&
               quota_ >= 1;
    }
    bool exact_fit_eligible() const {
        // At least as many quota packets as rounds left: claim every one of
        // them. In profile this fires exactly when the fit is tight (making
        // full phases run back to back); a quota beyond the whole window is
        // out of profile and the resulting collision escalates the window.
        return name_ == 2 && mode_ == Mode::Run && !first_phase_ && !exact_dead_ &&
               silences_ <= 1 && quota_ >= 1 && quota_ >= param_ - pos_;
    }
    bool catchup_eligible() const {
        return mode_ == Mode::Run && !first_phase_ && !catchup_dead_ && catchup_from_ >= 0 &&
               pos_ >= catchup_from_;
    }

    void start_phase() {
        ++phase_index_;
        quota_ = accum_;
        accum_ = 0;
        pos_ = 0;
        first_phase_ = false;
        silences_ = 0;
        opening_dead_ = false;
        exact_dead_ = false;
        catchup_dead_ = false;
        catchup_from_ = -1;
    }

    void begin_run() {
        // The record backlog is consumed at once. It jump-starts the first
        // phase of the new window; the packets it counts carry no quota (they
        // ride the subsequent quota flow oldest-first, or the catch-up
        // streaks), so an oversized backlog cannot force further collisions.
        const int consumed = static_cast<int>(delay_.size());
        delay_.clear();
        mode_ = Mode::Run;
        first_phase_ = true;
        pos_ = std::min(consumed, param_);
        quota_ = 0;
        accum_ = 0;
        if (pos_ == param_) start_phase();
    }

    bool escalates_;
    int param_;
    Mode mode_ = Mode::Run;
    bool first_phase_ = true;
    int pos_ = 0;
    std::int64_t quota_ = 0;  // spendable this phase: arrivals of the previous phase
    std::int64_t accum_ = 0;  // arrivals recorded during the current phase
    int silences_ = 0;
    long phase_index_ = 0;
    bool opening_dead_ = false;
    bool exact_dead_ = false;
    bool catchup_dead_ = false;
    int catchup_from_ = -1;
    std::int64_t old_left_ = 0;
    std::deque<int> delay_;
};

}  // namespace

StationSet two_full_sensing_i(int i) {
    StationSet set;
    for (StationId s = 1; s <= 2; ++s)
        set.push_back(std::make_unique<TwoFullSensingStation>(s, i, false));
    return set;
}

StationSet two_full_sensing() {
    StationSet set;
    for (StationId s = 1; s <= 2; ++s)
        set.push_back(std::make_unique<TwoFullSensingStation>(s, 1, true));
    return set;
}

}  // namespace mac
