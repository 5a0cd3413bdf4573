#include "mac/algorithms.hpp"
#include "mac/metrics.hpp"

#include <doctest.h>

using namespace mac;

namespace {

Trace run_script(StationSet set, const InjectionScript& script, const AdversaryType& type,
                 Round horizon) {
    auto src = scripted(script);
    return run(std::move(set), ChannelConfig{2, false}, *src, type, horizon);
}

/// Periodic burst scripts: (a, b) packets into stations 1 and 2 at the first
/// round of every w-aligned window starting at `offset`. These cover the
/// adversary's freedom of how to split and place a full window's budget.
InjectionScript burst_script(std::int64_t w, int a, int b, int offset, Round last_injection) {
    InjectionScript s;
    for (Round r = 1 + offset; r <= last_injection; r += w) {
        if (a > 0) s.add(r, 1, a);
        if (b > 0) s.add(r, 2, b);
    }
    return s;
}

}  // namespace

TEST_CASE("fixed window 1 delivers alternating singles within 4 rounds") {
    InjectionScript s;
    for (Round r = 1; r <= 40; ++r) s.add(r, r % 2 ? 1 : 2, 1);
    auto trace = run_script(two_full_sensing_i(1), s, AdversaryType::window(1), 50);
    auto rep = analyze(trace);
    CHECK(rep.unheard == 0);
    CHECK(rep.max_latency <= 4);
}

TEST_CASE("zero injections leave the phase protocol silent forever") {
    auto trace = run_script(two_full_sensing(), InjectionScript{},
                            AdversaryType::window(3), 100);
    for (const auto& rec : trace.records) CHECK(rec.feedback.kind == FeedbackKind::Silence);
}

TEST_CASE("escalating variant: burst splits at window 3 stay within 4w") {
    const std::int64_t w = 3;
    const auto type = AdversaryType::window(w);
    for (int a = 0; a <= w; ++a)
        for (int b = 0; a + b <= w; ++b)
            for (int offset = 0; offset < w; ++offset) {
                auto s = burst_script(w, a, b, offset, 60);
                REQUIRE(validate(s, type).feasible());
                auto trace = run_script(two_full_sensing(), s, type, 60 + 8 * w);
                auto rep = analyze(trace);
                CAPTURE(a);
                CAPTURE(b);
                CAPTURE(offset);
                CHECK(rep.unheard == 0);
                CHECK(rep.max_latency <= 4 * w);
                CHECK(rep.collision_rounds <= w - 1);
            }
}

TEST_CASE("escalating variant: randomized feasible streams stay within 4w") {
    for (std::int64_t w : {1, 2, 4}) {
        const auto type = AdversaryType::window(w);
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            auto s = random_feasible_script(type, 2, 400, seed);
            auto trace = run_script(two_full_sensing(), s, type, 400 + 8 * w);
            auto rep = analyze(trace);
            CAPTURE(w);
            CAPTURE(seed);
            CHECK(rep.unheard == 0);
            CHECK(rep.max_latency <= 4 * w);
        }
    }
}

TEST_CASE("no collisions occur after the window parameter reaches the adversary's") {
    // Once an escalation step matches the remaining stream's window, the
    // protocol must stay collision free.
    const auto type = AdversaryType::window(3);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto s = random_feasible_script(type, 2, 300, seed);
        auto trace = run_script(two_full_sensing(), s, type, 330);
        Round last_collision = 0;
        for (const auto& rec : trace.records)
            if (rec.transmitters.size() >= 2) last_collision = rec.round;
        // With at most w-1 collisions the last one happens early.
        CHECK(last_collision <= 200);
        int collisions = 0;
        for (const auto& rec : trace.records)
            if (rec.transmitters.size() >= 2) ++collisions;
        CHECK(collisions <= 2);
    }
}

TEST_CASE("fixed window drains an in-profile burst next phase") {
    // Window 2, burst of 2 into station 2 during the first phase: both heard
    // during the following phase.
    InjectionScript s;
    s.add(1, 2, 2);
    auto trace = run_script(two_full_sensing_i(2), s, AdversaryType::window(2), 6);
    auto rep = analyze(trace);
    CHECK(rep.unheard == 0);
    CHECK(rep.max_latency <= 4);
}
