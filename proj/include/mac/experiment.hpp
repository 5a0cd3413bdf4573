#pragma once

#include "mac/algorithms.hpp"
#include "mac/metrics.hpp"
#include "mac/search.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace mac {

/// A single experiment: one algorithm, one adversary, one horizon, plus the
/// guarantees to check. Parsed from a flat key = value file with [sections].
struct ExperimentConfig {
    std::string algorithm;   // registry name, e.g. "move_big_to_front"
    int param = 0;           // window parameter for the fixed-window variants
    int n = 2;
    Round horizon = 1000;
    bool collision_detection = false;
    std::uint64_t seed = 1;

    AdversaryType adversary = AdversaryType::leaky_bucket(0);
    std::string generator = "saturating";  // saturating | saturating_cycle |
                                           // pattern_pair | scripted | random
    StationId target = 1;                  // saturating
    StationId pair_first = 1, pair_second = 2;
    std::string script_path;               // scripted

    std::vector<std::string> bounds;       // names from the bound registry

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::filesystem::path& file);
    std::string serialize() const;

    /// Arity and collision-detection consistency; throws on mismatch.
    void validate_consistency() const;
};

/// Builds the station set named by the config ("reservation_wrap:<inner>"
/// wraps the inner registry entry).
StationSet make_algorithm(const std::string& name, int n, int param);

/// Resolves a bound-registry name against the config's parameters.
Bound make_bound(const std::string& name, const ExperimentConfig& cfg);

struct ExperimentResult {
    Trace trace;
    QoSReport report;
    std::vector<BoundCheck> checks;
    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Runs the experiment and, when out_dir is nonempty, writes trace.txt,
/// trace.csv, script.txt, qos.txt, qos.json and bounds.txt there. Identical
/// configs produce byte-identical artifacts.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir = {});

void write_trace_text(const Trace& trace, std::ostream& os);
void write_trace_csv(const Trace& trace, std::ostream& os);

/// One cell of a results matrix.
struct MatrixCell {
    std::string group;      // algorithm class row
    std::string setting;    // station count / adversary column
    std::string claim;      // what the cell asserts
    std::string verdict;    // demonstrated / refuted / pass / FAIL text
    bool ok = false;
};

struct MatrixResult {
    std::string suite;
    std::vector<MatrixCell> cells;
    bool ok() const {
        for (const auto& c : cells)
            if (!c.ok) return false;
        return true;
    }
    std::string to_table() const;
};

/// Executes a predefined experiment grid. Suites: "window-matrix",
/// "leaky-bucket-matrix", "bounds-sweep". Cells run in parallel up to
/// `workers` (0 = pick from MACSIM_WORKERS or hardware).
MatrixResult run_matrix(const std::string& suite, int workers = 0);

}  // namespace mac
