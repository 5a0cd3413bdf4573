#include "mac/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::filesystem::path default_out(const std::string& sub) {
    if (const char* env = std::getenv("MACSIM_OUT"))
        return std::filesystem::path(env) / sub;
    return std::filesystem::path("out") / sub;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

mac::AdversaryType parse_type(const std::string& kind, std::int64_t w, std::int64_t b) {
    if (kind == "window") return mac::AdversaryType::window(w);
    if (kind == "leaky_bucket") return mac::AdversaryType::leaky_bucket(b);
    throw std::runtime_error("adversary kind must be window or leaky_bucket");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Round-accurate simulator for deterministic broadcast protocols on a "
                 "synchronous multiple access channel under adversarial injection"};
    app.require_subcommand(1);

    // ---- run -------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "run a single experiment");
    std::string cfg_path, out_dir;
    std::string algorithm, generator, adv_kind;
    std::vector<std::string> bound_names;
    int n = 0, param = 0;
    std::int64_t horizon = 0, adv_w = 0, adv_b = -1;
    std::uint64_t seed = 0;
    int target = 0;
    bool cd = false;
    std::string script_path;
    run_cmd->add_option("--config", cfg_path, "experiment config file");
    run_cmd->add_option("--out", out_dir, "artifact directory");
    run_cmd->add_option("--algorithm", algorithm, "algorithm name");
    run_cmd->add_option("--param", param, "algorithm window parameter");
    run_cmd->add_option("--n", n, "station count");
    run_cmd->add_option("--horizon", horizon, "rounds to simulate");
    run_cmd->add_option("--seed", seed, "seed for randomized sweeps");
    run_cmd->add_flag("--collision-detection", cd, "channel has collision detection");
    run_cmd->add_option("--adversary", adv_kind, "window | leaky_bucket");
    run_cmd->add_option("--w", adv_w, "window size");
    run_cmd->add_option("--b", adv_b, "leaky bucket allowance");
    run_cmd->add_option("--generator", generator,
                        "saturating | saturating_cycle | pattern_pair | scripted | random");
    run_cmd->add_option("--target", target, "saturating target station");
    run_cmd->add_option("--script", script_path, "injection script for scripted generator");
    run_cmd->add_option("--bound", bound_names, "bound registry names to check");

    // ---- matrix ----------------------------------------------------------
    auto* matrix_cmd = app.add_subcommand("matrix", "run a predefined result matrix");
    std::string suite;
    std::string matrix_out;
    matrix_cmd->add_option("--suite", suite, "window-matrix | leaky-bucket-matrix | bounds-sweep")
        ->required();
    matrix_cmd->add_option("--out", matrix_out, "summary file directory");

    // ---- validate ----------------------------------------------------------
    auto* validate_cmd = app.add_subcommand("validate", "validate a script against a type");
    std::string v_script, v_kind = "window";
    std::int64_t v_w = 1, v_b = 0;
    validate_cmd->add_option("--script", v_script, "script file")->required();
    validate_cmd->add_option("--adversary", v_kind, "window | leaky_bucket");
    validate_cmd->add_option("--w", v_w, "window size");
    validate_cmd->add_option("--b", v_b, "leaky bucket allowance");

    // ---- search ------------------------------------------------------------
    auto* search_cmd = app.add_subcommand("search", "run an adaptive adversary search");
    std::string s_op = "void_forcer", s_algorithm, s_kind = "leaky_bucket", s_out;
    int s_n = 2, s_param = 0, s_depth = 160;
    std::int64_t s_w = 2, s_b = 1, s_horizon = 10000;
    search_cmd->add_option("--op", s_op, "void_forcer | omega_n2 | retaining_breaker");
    search_cmd->add_option("--algorithm", s_algorithm, "target algorithm")->required();
    search_cmd->add_option("--param", s_param, "algorithm window parameter");
    search_cmd->add_option("--n", s_n, "station count");
    search_cmd->add_option("--adversary", s_kind, "window | leaky_bucket");
    search_cmd->add_option("--w", s_w, "window size");
    search_cmd->add_option("--b", s_b, "leaky bucket allowance");
    search_cmd->add_option("--horizon", s_horizon, "rounds to commit");
    search_cmd->add_option("--depth", s_depth, "probe lookahead");
    search_cmd->add_option("--out", s_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            mac::ExperimentConfig cfg;
            if (!cfg_path.empty()) cfg = mac::ExperimentConfig::load(cfg_path);
            if (!algorithm.empty()) cfg.algorithm = algorithm;
            if (param > 0) cfg.param = param;
            if (n > 0) cfg.n = n;
            if (horizon > 0) cfg.horizon = horizon;
            if (seed > 0) cfg.seed = seed;
            if (cd) cfg.collision_detection = true;
            if (!adv_kind.empty()) cfg.adversary = parse_type(adv_kind, adv_w, adv_b);
            if (!generator.empty()) cfg.generator = generator;
            if (target > 0) cfg.target = target;
            if (!script_path.empty()) cfg.script_path = script_path;
            for (const auto& b : bound_names) cfg.bounds.push_back(b);
            const auto dir = out_dir.empty() ? default_out("run") : std::filesystem::path(out_dir);
            mac::ExperimentResult result = mac::run_experiment(cfg, dir);
            std::cout << result.report.to_text();
            for (const auto& c : result.checks) std::cout << c.describe() << "\n";
            std::cout << "artifacts: " << dir.string() << "\n";
            return result.ok() ? 0 : 1;
        }
        if (*matrix_cmd) {
            mac::MatrixResult result = mac::run_matrix(suite);
            const std::string table = result.to_table();
            std::cout << table;
            if (!matrix_out.empty()) {
                std::filesystem::create_directories(matrix_out);
                std::ofstream os(std::filesystem::path(matrix_out) / (suite + ".txt"));
                os << table;
            }
            return result.ok() ? 0 : 1;
        }
        if (*validate_cmd) {
            const auto script = mac::InjectionScript::parse(slurp(v_script));
            const auto verdict = mac::validate(script, parse_type(v_kind, v_w, v_b));
            if (verdict.feasible()) {
                std::cout << "feasible\n";
                return 0;
            }
            std::cout << "violation: " << verdict.violation->describe() << "\n";
            return 1;
        }
        if (*search_cmd) {
            mac::SimulationState state(mac::make_algorithm(s_algorithm, s_n, s_param),
                                       mac::ChannelConfig{s_n, false});
            mac::SearchOutcome out;
            if (s_op == "void_forcer") {
                mac::ScenarioBudget budget;
                budget.max_branch_depth = s_depth;
                out = mac::void_forcer(state, parse_type(s_kind, s_w, s_b), budget, s_horizon);
            } else if (s_op == "omega_n2") {
                out = mac::omega_n2_adversary(state, s_n, s_horizon);
            } else if (s_op == "retaining_breaker") {
                mac::ScenarioBudget budget;
                budget.max_branch_depth = s_depth;
                out = mac::retaining_breaker(state, budget, s_horizon);
            } else {
                throw std::runtime_error("unknown search op: " + s_op);
            }
            std::cout << "milestones " << out.milestones.size() << "\n";
            for (const auto& m : out.milestones)
                std::cout << "milestone round=" << m.round << " kind="
                          << (m.kind == mac::FeedbackKind::Collision ? "collision" : "silence")
                          << " queued=" << m.queued_at_milestone << "\n";
            std::cout << "max_stored " << out.max_stored_seen << "\n"
                      << "stages " << out.stages_completed << "\n"
                      << "fallback " << (out.fallback_taken ? "yes" : "no") << "\n";
            if (!s_out.empty()) {
                std::filesystem::create_directories(s_out);
                std::ofstream os(std::filesystem::path(s_out) / "script.txt");
                os << out.script.serialize();
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
