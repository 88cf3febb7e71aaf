#pragma once
// Experiment orchestration: configuration (TOML subset or flag overrides),
// reproducible seed derivation, a replica-level worker pool whose output is
// schedule-independent, and CSV/JSON result writing.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gffperc {

inline constexpr const char* kVersion = "1.0.0";

// Minimal TOML subset: [section] headers, key = value lines with integers,
// floats, booleans, double-quoted strings, flat arrays of those, and
// # comments. Keys inside a section are addressed as "section.key".
class TomlTable {
  public:
    bool has(const std::string& key) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<int64_t> get_int_array(const std::string& key) const;
    std::vector<double> get_double_array(const std::string& key) const;
    std::vector<std::string> get_string_array(const std::string& key) const;

    std::map<std::string, int64_t> ints;
    std::map<std::string, double> doubles;
    std::map<std::string, bool> bools;
    std::map<std::string, std::string> strings;
    std::map<std::string, std::vector<int64_t>> int_arrays;
    std::map<std::string, std::vector<double>> double_arrays;
    std::map<std::string, std::vector<std::string>> string_arrays;
};

TomlTable parse_toml(const std::string& text);
TomlTable parse_toml_file(const std::string& path);

struct ExperimentConfig {
    std::string kind = "giant_fraction";
    int d = 3;
    double h = 0.0;
    std::vector<int> n_grid = {2000};
    int64_t replicas = 100;
    uint64_t seed = 1;
    double kappa = 0.25;        // exploration security-radius coefficient
    double lambda_hat = 0.0;    // exploration growth rate; 0 = per-run tree estimate
    int K = 24;                 // tree-process generation horizon
    int64_t tree_replicas = 20000;
    int census_radius = 2;
    int64_t distance_pairs = 1000;  // per replica
    int boundary_floor = 16;
    int threads = 0;  // worker count; 0 = all available cores
    std::string out_dir = "out";
};

// Throws std::invalid_argument on unknown kind, odd n*d, or degenerate sizes.
void validate_config(const ExperimentConfig& cfg);

// Reads flat keys or their "experiment."-prefixed variants; unknown keys are
// ignored so configs can carry commentary values.
ExperimentConfig config_from_toml(const TomlTable& table);

// Named-parameter override used by sweep and the CLI; "n" accepts a comma
// list for the grid. Throws on unknown names.
void apply_parameter(ExperimentConfig& cfg, const std::string& name, const std::string& value);

// Stable serialization of every result-relevant field (threads and out_dir
// excluded: they affect scheduling and placement, never values).
std::string canonical_config_string(const ExperimentConfig& cfg);
uint64_t config_hash(const ExperimentConfig& cfg);

struct ReplicaRow {
    int n = 0;
    int64_t replica = 0;
    std::vector<double> values;
};

struct PlotSeries {
    std::string name;
    std::vector<std::array<double, 3>> points;  // x, y, yerr
};

struct ExperimentResult {
    ExperimentConfig config;
    uint64_t hash = 0;
    std::vector<std::string> columns;
    std::vector<ReplicaRow> rows;  // grid order, replica-index order within n
    std::map<std::string, double> summary;
    std::vector<PlotSeries> plots;
    std::map<std::string, int64_t> census;  // local_limit only
};

// Runs the configured replicas on the worker pool, writes replicas.csv,
// summary.json, plotdata_*.csv (and census.csv when applicable) into
// cfg.out_dir, and returns the result. Byte-identical outputs for identical
// (config, seed) regardless of thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes the files produced by run_experiment; exposed for re-emission.
void write_result(const ExperimentResult& result, const std::string& dir);

// One run_experiment per value (out_dir/<name>_<value> each), plus an
// aggregated sweep.csv table under the template's out_dir.
std::vector<ExperimentResult> sweep(const ExperimentConfig& cfg_template, const std::string& name,
                                    const std::vector<std::string>& values);

// Replica-level pool: executes body(0..count-1), default worker count = all
// cores. The caller owns output placement (one preallocated slot per index),
// so results are merged in index order by construction.
void parallel_replicas(int64_t count, int threads, const std::function<void(int64_t)>& body);

}  // namespace gffperc
