#include "mac/algorithms.hpp"
#include "mac/experiment.hpp"
#include "mac/metrics.hpp"

#include <iostream>

using namespace mac;

int main() {
    const std::int64_t w = 4;
    const auto type = AdversaryType::window(w);
    auto script = random_feasible_script(type, 2, 400, 14);
    auto src = scripted(script);
    auto trace = run(two_full_sensing(), ChannelConfig{2, false}, *src, type, 432);
    auto rep = analyze(trace);
    std::cout << "max_latency=" << rep.max_latency << " unheard=" << rep.unheard
              << " collisions=" << rep.collision_rounds << "\n";
    // locate the worst packet
    Round worst_round = 0;
    Round worst = 0;
    for (const auto& rec : trace.records)
        if (rec.heard_real_packet() && rec.round - rec.heard->injected_round > worst) {
            worst = rec.round - rec.heard->injected_round;
            worst_round = rec.round;
        }
    std::cout << "worst packet heard at " << worst_round << " latency " << worst << "\n";
    // re-run with internals printed
    SimulationState dbg(two_full_sensing(), ChannelConfig{2, false});
    auto src2 = scripted(script);
    Round from = std::max<Round>(1, worst_round - worst - 6);
    for (Round r = 1; r <= std::min<Round>(trace.horizon(), worst_round + 4); ++r) {
        auto inj = src2->injections_for(r);
        dbg.step_round(inj);
        if (r < from) continue;
        const auto& rec = trace.records[static_cast<size_t>(r - 1)];
        std::cout << r << " inj=";
        for (auto [s, c] : rec.injections) std::cout << s << ":" << c << " ";
        std::cout << "tx=";
        for (auto t : rec.transmitters) std::cout << t;
        std::cout << " fb="
                  << (rec.feedback.kind == FeedbackKind::Heard
                          ? "H"
                          : rec.feedback.kind == FeedbackKind::Silence ? "S" : "C");
        if (rec.heard)
            std::cout << " heard@" << rec.heard->injected_round << "s"
                      << rec.heard->injected_station;
        std::cout << " q=" << rec.queue_sizes[0] << "," << rec.queue_sizes[1]
                  << "  [1: " << dbg.station(1).debug_state() << "] [2: "
                  << dbg.station(2).debug_state() << "]\n";
    }
    return 0;
}
