#include "mac/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

namespace mac {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Rate parse_rate(const std::string& v) {
    if (auto pos = v.find('/'); pos != std::string::npos)
        return Rate{std::stoll(v.substr(0, pos)), std::stoll(v.substr(pos + 1))};
    return Rate{std::stoll(v), 1};
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    std::string adv_kind = "leaky_bucket";
    std::int64_t adv_w = 1, adv_b = 0;
    Rate adv_rate = Rate::one();
    while (std::getline(is, line)) {
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad config line: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section == "experiment" || section.empty()) {
            if (key == "algorithm") cfg.algorithm = value;
            else if (key == "param") cfg.param = std::stoi(value);
            else if (key == "n") cfg.n = std::stoi(value);
            else if (key == "horizon") cfg.horizon = std::stoll(value);
            else if (key == "collision_detection") cfg.collision_detection = value == "true" || value == "1";
            else if (key == "seed") cfg.seed = std::stoull(value);
            else throw std::invalid_argument("unknown experiment key: " + key);
        } else if (section == "adversary") {
            if (key == "kind") adv_kind = value;
            else if (key == "w") adv_w = std::stoll(value);
            else if (key == "b") adv_b = std::stoll(value);
            else if (key == "rate") adv_rate = parse_rate(value);
            else if (key == "generator") cfg.generator = value;
            else if (key == "target") cfg.target = std::stoi(value);
            else if (key == "first") cfg.pair_first = std::stoi(value);
            else if (key == "second") cfg.pair_second = std::stoi(value);
            else if (key == "script") cfg.script_path = value;
            else throw std::invalid_argument("unknown adversary key: " + key);
        } else if (section == "bounds") {
            if (key == "check") cfg.bounds.push_back(value);
            else throw std::invalid_argument("unknown bounds key: " + key);
        } else {
            throw std::invalid_argument("unknown section: " + section);
        }
    }
    cfg.adversary = adv_kind == "window" ? AdversaryType::window(adv_w, adv_rate)
                                         : AdversaryType::leaky_bucket(adv_b, adv_rate);
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config: " + file.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

std::string ExperimentConfig::serialize() const {
    std::ostringstream os;
    os << "[experiment]\n"
       << "algorithm = " << algorithm << "\n"
       << "param = " << param << "\n"
       << "n = " << n << "\n"
       << "horizon = " << horizon << "\n"
       << "collision_detection = " << (collision_detection ? "true" : "false") << "\n"
       << "seed = " << seed << "\n\n[adversary]\n";
    if (adversary.kind == AdversaryType::Kind::Window)
        os << "kind = window\nw = " << adversary.w << "\n";
    else
        os << "kind = leaky_bucket\nb = " << adversary.b << "\n";
    os << "rate = " << adversary.rate.num << "/" << adversary.rate.den << "\n"
       << "generator = " << generator << "\n"
       << "target = " << target << "\n"
       << "first = " << pair_first << "\n"
       << "second = " << pair_second << "\n";
    if (!script_path.empty()) os << "script = " << script_path << "\n";
    os << "\n[bounds]\n";
    for (const auto& b : bounds) os << "check = " << b << "\n";
    return os.str();
}

StationSet make_algorithm(const std::string& name, int n, int param) {
    if (name.rfind("reservation_wrap:", 0) == 0)
        return reservation_wrap(make_algorithm(name.substr(17), n, param));
    if (name == "round_robin") return round_robin(n);
    if (name == "all_ones") return all_ones(n);
    if (name == "ack_primes") return ack_primes(n);
    if (name == "centralized") return centralized(n);
    if (name == "token_cycle") return token_cycle(n);
    if (name == "two_adaptive") return two_adaptive();
    if (name == "two_full_sensing") return two_full_sensing();
    if (name == "two_full_sensing_i") return two_full_sensing_i(param);
    if (name == "three_adaptive_window") return three_adaptive_window(param);
    if (name == "three_adaptive_col_det") return three_adaptive_col_det();
    if (name == "three_adaptive") return three_adaptive();
    if (name == "move_big_to_front") return move_big_to_front(n);
    throw std::invalid_argument("unknown algorithm: " + name);
}

void ExperimentConfig::validate_consistency() const {
    const StationSet probe = make_algorithm(algorithm, n, param);
    if (static_cast<int>(probe.size()) != n)
        throw std::invalid_argument("algorithm " + algorithm + " does not support n=" +
                                    std::to_string(n));
    for (const auto& st : probe)
        if (st->algorithm_class().requires_collision_detection && !collision_detection)
            throw std::invalid_argument(
                "algorithm " + algorithm + " requires collision_detection = true");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
}

Bound make_bound(const std::string& name, const ExperimentConfig& cfg) {
    const std::int64_t w = cfg.adversary.kind == AdversaryType::Kind::Window
                               ? cfg.adversary.w
                               : cfg.adversary.b;  // window-style parameter
    const std::int64_t b = cfg.adversary.kind == AdversaryType::Kind::LeakyBucket
                               ? cfg.adversary.b
                               : cfg.adversary.w;
    if (name == "mbtf_stored") return bound_mbtf_stored(cfg.n, b);
    if (name == "two_adaptive_stored") return bound_two_adaptive_stored(b);
    if (name == "two_fs_latency") return bound_two_fs_latency(w);
    if (name == "three_window_latency") return bound_three_window_latency(w);
    if (name == "three_col_det_latency") return bound_three_col_det_latency(w);
    if (name == "three_plain_latency") return bound_three_plain_latency(w);
    if (name == "centralized_delay") return bound_centralized_delay(b);
    if (name == "ack_primes_wait") return bound_ack_primes_latency(cfg.n);
    if (name == "omega_stored") return bound_omega_n2_stored(cfg.n);
    throw std::invalid_argument("unknown bound: " + name);
}

namespace {

std::unique_ptr<InjectionSource> make_source(const ExperimentConfig& cfg) {
    if (cfg.generator == "saturating") return saturating(cfg.target);
    if (cfg.generator == "saturating_cycle") return saturating_cycle(cfg.n);
    if (cfg.generator == "pattern_pair") return pattern_pair(cfg.pair_first, cfg.pair_second);
    if (cfg.generator == "scripted") {
        std::ifstream in(cfg.script_path);
        if (!in) throw std::runtime_error("cannot open script: " + cfg.script_path);
        std::ostringstream os;
        os << in.rdbuf();
        return scripted(InjectionScript::parse(os.str()));
    }
    if (cfg.generator == "random")
        return scripted(random_feasible_script(cfg.adversary, cfg.n, cfg.horizon, cfg.seed));
    throw std::invalid_argument("unknown generator: " + cfg.generator);
}

std::string feedback_code(const RoundRecord& rec) {
    switch (rec.feedback.kind) {
        case FeedbackKind::Heard: return rec.heard ? "H" : "h";  // h = control bits only
        case FeedbackKind::Collision: return "C";
        case FeedbackKind::Silence: return "S";
    }
    return "?";
}

}  // namespace

void write_trace_text(const Trace& trace, std::ostream& os) {
    os << "# trace v1\n";
    os << "config n=" << trace.config.n
       << " collision_detection=" << (trace.config.collision_detection ? 1 : 0) << "\n";
    os << "adversary " << trace.adversary_type.describe() << "\n";
    for (const RoundRecord& rec : trace.records) {
        os << rec.round << " inj=";
        for (size_t i = 0; i < rec.injections.size(); ++i) {
            if (i) os << ",";
            os << rec.injections[i].first << ":" << rec.injections[i].second;
        }
        if (rec.injections.empty()) os << "-";
        os << " tx=";
        for (size_t i = 0; i < rec.transmitters.size(); ++i) {
            if (i) os << ",";
            os << rec.transmitters[i];
        }
        if (rec.transmitters.empty()) os << "-";
        os << " fb=" << feedback_code(rec);
        os << " heard=";
        if (rec.heard)
            os << rec.heard->id << ":" << rec.heard->injected_round << ":"
               << rec.heard->injected_station << (rec.heard->dummy ? ":D" : "");
        else
            os << "-";
        os << " q=";
        for (size_t i = 0; i < rec.queue_sizes.size(); ++i) {
            if (i) os << ",";
            os << rec.queue_sizes[i];
        }
        os << "\n";
    }
}

void write_trace_csv(const Trace& trace, std::ostream& os) {
    os << "round,transmitters,feedback,total_stored\n";
    for (const RoundRecord& rec : trace.records) {
        os << rec.round << ",";
        for (size_t i = 0; i < rec.transmitters.size(); ++i) {
            if (i) os << "|";
            os << rec.transmitters[i];
        }
        os << "," << feedback_code(rec) << "," << rec.total_stored() << "\n";
    }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir) {
    cfg.validate_consistency();
    auto source = make_source(cfg);
    SimulationState state(make_algorithm(cfg.algorithm, cfg.n, cfg.param),
                          ChannelConfig{cfg.n, cfg.collision_detection});
    ExperimentResult result;
    result.trace = run(state, *source, cfg.adversary, cfg.horizon);
    result.report = analyze(result.trace);
    for (const auto& name : cfg.bounds)
        result.checks.push_back(check_bound(result.report, make_bound(name, cfg)));

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        {
            std::ofstream os(out_dir / "trace.txt");
            write_trace_text(result.trace, os);
        }
        {
            std::ofstream os(out_dir / "trace.csv");
            write_trace_csv(result.trace, os);
        }
        {
            std::ofstream os(out_dir / "script.txt");
            os << result.trace.injection_script().serialize();
        }
        {
            std::ofstream os(out_dir / "qos.txt");
            os << result.report.to_text();
        }
        {
            std::ofstream os(out_dir / "qos.json");
            os << result.report.to_json() << "\n";
        }
        {
            std::ofstream os(out_dir / "bounds.txt");
            for (const auto& c : result.checks) os << c.describe() << "\n";
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Matrix suites
// ---------------------------------------------------------------------------

namespace {

struct CellSpec {
    std::string group, setting, claim;
    std::function<std::pair<bool, std::string>()> body;
};

std::pair<bool, std::string> demo_growth(const std::string& algorithm, int n,
                                         const AdversaryType& type, Round horizon,
                                         Round min_milestones) {
    SimulationState state(make_algorithm(algorithm, n, 0), ChannelConfig{n, false});
    SearchOutcome out = void_forcer(state, type, ScenarioBudget{}, horizon);
    const auto count = static_cast<Round>(out.milestones.size());
    std::ostringstream os;
    os << count << " growth milestones at horizon " << horizon;
    return {count >= min_milestones, os.str()};
}

std::pair<bool, std::string> demo_bound(ExperimentConfig cfg, const std::string& bound,
                                        int sweeps) {
    cfg.bounds = {bound};
    std::int64_t worst = 0;
    Bound resolved = make_bound(bound, cfg);
    for (int s = 0; s < sweeps; ++s) {
        cfg.seed = static_cast<std::uint64_t>(s + 1);
        ExperimentResult r = run_experiment(cfg);
        worst = std::max(worst, r.checks[0].observed);
        if (!r.ok()) {
            return {false, "FAIL " + r.checks[0].describe() + " (seed " +
                               std::to_string(cfg.seed) + ")"};
        }
    }
    std::ostringstream os;
    os << resolved.quantity << " <= " << resolved.allowed << " over " << sweeps
       << " sweeps (worst " << worst << ")";
    return {true, os.str()};
}

int pick_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MACSIM_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

}  // namespace

std::string MatrixResult::to_table() const {
    size_t wg = 12, ws = 18, wc = 28;
    for (const auto& c : cells) {
        wg = std::max(wg, c.group.size());
        ws = std::max(ws, c.setting.size());
        wc = std::max(wc, c.claim.size());
    }
    std::ostringstream os;
    os << "suite: " << suite << "\n";
    os << std::left << std::setw(static_cast<int>(wg) + 2) << "class"
       << std::setw(static_cast<int>(ws) + 2) << "setting"
       << std::setw(static_cast<int>(wc) + 2) << "claim" << "result\n";
    for (const auto& c : cells)
        os << std::left << std::setw(static_cast<int>(wg) + 2) << c.group
           << std::setw(static_cast<int>(ws) + 2) << c.setting
           << std::setw(static_cast<int>(wc) + 2) << c.claim << c.verdict << "\n";
    return os.str();
}

MatrixResult run_matrix(const std::string& suite, int workers) {
    std::vector<CellSpec> specs;
    const auto lb1 = AdversaryType::leaky_bucket(1);
    const auto w2 = AdversaryType::window(2);

    auto cfg_of = [](std::string algo, int n, AdversaryType type, std::string gen,
                     Round horizon, int param = 0) {
        ExperimentConfig c;
        c.algorithm = std::move(algo);
        c.n = n;
        c.adversary = type;
        c.generator = std::move(gen);
        c.horizon = horizon;
        c.param = param;
        return c;
    };

    if (suite == "window-matrix") {
        specs.push_back({"ack based", "n=2, window(1,2)", "stable: impossible",
                         [=] { return demo_growth("all_ones", 2, w2, 10000, 200); }});
        specs.push_back({"full sensing", "n=2, window(1,2)", "fair latency: possible", [=] {
                             return demo_bound(cfg_of("two_full_sensing", 2, w2, "random", 2000),
                                               "two_fs_latency", 20);
                         }});
        specs.push_back({"full sensing", "n=3, window(1,2)", "stable: impossible",
                         [=] { return demo_growth("round_robin", 3, w2, 10000, 200); }});
        specs.push_back({"general", "n=3, window(1,2)", "fair latency: possible", [=] {
                             return demo_bound(cfg_of("three_adaptive", 3, w2, "random", 2000),
                                               "three_plain_latency", 20);
                         }});
        specs.push_back({"general", "n=4, window(1,2)", "stable: possible", [=] {
                             auto c = cfg_of("move_big_to_front", 4, w2, "random", 10000);
                             return demo_bound(c, "mbtf_stored", 10);
                         }});
        specs.push_back({"general", "n=4, window(1,2)", "stable and fair: impossible", [=] {
                             SimulationState st(make_algorithm("round_robin", 4, 0),
                                                ChannelConfig{4, false});
                             auto out = retaining_breaker(st, ScenarioBudget{}, 10000);
                             std::ostringstream os;
                             os << out.milestones.size() << " growth milestones at horizon 10000";
                             return std::make_pair(out.milestones.size() >= 200, os.str());
                         }});
    } else if (suite == "leaky-bucket-matrix") {
        specs.push_back({"ack based", "n=1, leaky-bucket(1,1)", "fair latency: possible", [=] {
                             Round worst = 0;
                             for (std::uint64_t s = 1; s <= 20; ++s) {
                                 auto c = cfg_of("all_ones", 1, lb1, "random", 2000);
                                 c.seed = s;
                                 worst = std::max(worst, run_experiment(c).report.max_latency);
                             }
                             std::ostringstream os;
                             os << "max latency " << worst << " <= 2(b+1)";
                             return std::make_pair(worst <= 4, os.str());
                         }});
        specs.push_back({"full sensing", "n=2, leaky-bucket(1,1)", "stable: impossible",
                         [=] { return demo_growth("two_full_sensing", 2, lb1, 10000, 200); }});
        specs.push_back({"general", "n=2, leaky-bucket(1,1)", "stable: possible", [=] {
                             return demo_bound(cfg_of("two_adaptive", 2, lb1, "random", 10000),
                                               "two_adaptive_stored", 20);
                         }});
        specs.push_back({"general", "n=2, leaky-bucket(1,1)", "stable and fair: impossible",
                         [=] { return demo_growth("round_robin", 2, lb1, 10000, 200); }});
        specs.push_back({"general", "n=6, leaky-bucket(1,1)", "stable: possible", [=] {
                             auto c = cfg_of("move_big_to_front", 6, lb1, "saturating", 10000);
                             return demo_bound(c, "mbtf_stored", 1);
                         }});
    } else if (suite == "bounds-sweep") {
        for (int n : {2, 4, 6}) {
            for (std::int64_t b : {0, 2}) {
                auto c = cfg_of("move_big_to_front", n, AdversaryType::leaky_bucket(b),
                                "random", 10000);
                std::ostringstream set;
                set << "n=" << n << ", leaky-bucket(1," << b << ")";
                specs.push_back({"move_big_to_front", set.str(),
                                 "stored <= 2(n^2+b)",
                                 [c] { return demo_bound(c, "mbtf_stored", 5); }});
            }
        }
        for (std::int64_t b : {0, 2, 4}) {
            auto c = cfg_of("two_adaptive", 2, AdversaryType::leaky_bucket(b), "random",
                            10000);
            std::ostringstream set;
            set << "n=2, leaky-bucket(1," << b << ")";
            specs.push_back({"two_adaptive", set.str(), "stored <= b+2",
                             [c] { return demo_bound(c, "two_adaptive_stored", 10); }});
        }
        for (std::int64_t w : {1, 2, 4}) {
            auto c = cfg_of("two_full_sensing", 2, AdversaryType::window(w), "random", 2000);
            std::ostringstream set;
            set << "n=2, window(1," << w << ")";
            specs.push_back({"two_full_sensing", set.str(), "latency <= 4w",
                             [c] { return demo_bound(c, "two_fs_latency", 20); }});
        }
        for (std::int64_t w : {1, 2, 3}) {
            auto cw = cfg_of("three_adaptive_window", 3, AdversaryType::window(w), "random",
                             2000, static_cast<int>(w));
            std::ostringstream set;
            set << "n=3, window(1," << w << ")";
            specs.push_back({"three_adaptive_window", set.str(), "latency <= 2w+1",
                             [cw] { return demo_bound(cw, "three_window_latency", 20); }});
            auto cp = cfg_of("three_adaptive", 3, AdversaryType::window(w), "random", 2000);
            specs.push_back({"three_adaptive", set.str(), "latency < 6w",
                             [cp] { return demo_bound(cp, "three_plain_latency", 20); }});
        }
        for (std::int64_t b : {0, 3}) {
            auto c = cfg_of("centralized", 3, AdversaryType::leaky_bucket(b), "random", 500);
            std::ostringstream set;
            set << "n=3, leaky-bucket(1," << b << ")";
            specs.push_back({"centralized", set.str(), "delay <= b+1",
                             [c] { return demo_bound(c, "centralized_delay", 20); }});
        }
        {
            auto c = cfg_of("ack_primes", 21, AdversaryType::leaky_bucket(1), "saturating",
                            2 * ack_primes_schedule(21).fairness_bound);
            specs.push_back({"ack_primes", "n=21, leaky-bucket(1,1)",
                             "pending wait <= ceil(6 n^2 ln n)",
                             [c] { return demo_bound(c, "ack_primes_wait", 1); }});
        }
    } else {
        throw std::invalid_argument("unknown suite: " + suite);
    }

    MatrixResult result;
    result.suite = suite;
    result.cells.resize(specs.size());
    std::atomic<size_t> next{0};
    const int nworkers = std::min<int>(pick_workers(workers),
                                       std::max<int>(1, static_cast<int>(specs.size())));
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            MatrixCell cell;
            cell.group = specs[i].group;
            cell.setting = specs[i].setting;
            cell.claim = specs[i].claim;
            try {
                auto [ok, text] = specs[i].body();
                cell.ok = ok;
                cell.verdict = (ok ? "demonstrated: " : "FAILED: ") + text;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.verdict = std::string("ERROR: ") + e.what();
            }
            result.cells[i] = std::move(cell);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nworkers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return result;
}

}  // namespace mac
