// gffperc command-line laboratory: graph generation, field sampling,
// level-set analysis, tree-process estimators, lazy exploration, and the
// experiment/sweep harness. Errors leave as machine-readable JSON on stderr
// with a nonzero exit code.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gffperc/exploration.hpp"
#include "gffperc/gff.hpp"
#include "gffperc/green.hpp"
#include "gffperc/harness.hpp"
#include "gffperc/levelset.hpp"
#include "gffperc/multigraph.hpp"
#include "gffperc/rng.hpp"
#include "gffperc/stats.hpp"
#include "gffperc/tree_process.hpp"

namespace {

using gffperc::Field;
using gffperc::Multigraph;
using nlohmann::json;

std::string hex64(uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Multigraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return gffperc::read_edge_list(in);
}

void save_graph(const std::string& path, const Multigraph& g) {
    if (path.empty() || path == "-") {
        gffperc::write_edge_list(std::cout, g);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file: " + path);
    gffperc::write_edge_list(out, g);
}

void write_field_csv(const std::string& path, const Field& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write field file: " + path);
    out << "vertex,value\n";
    for (size_t v = 0; v < f.values.size(); ++v) out << v << "," << g17(f.values[v]) << "\n";
}

Field read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field file: " + path);
    Field f;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty field file: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("bad field row: " + line);
        const size_t vertex = std::stoul(line.substr(0, comma));
        const double value = std::stod(line.substr(comma + 1));
        if (f.values.size() <= vertex) f.values.resize(vertex + 1, 0.0);
        f.values[vertex] = value;
    }
    return f;
}

// Shared by analyze when no files are given: deterministic graph + one exact
// field sample from the seed.
Multigraph generate_for_cli(int n, int d, uint64_t seed, bool simple) {
    gffperc::Rng rng(gffperc::derive_seed(seed, {"graph"}));
    return simple ? gffperc::generate_simple_graph(n, d, rng)
                  : gffperc::generate_configuration_model(n, d, rng);
}

int cmd_generate(int n, int d, uint64_t seed, bool simple, const std::string& out_path) {
    const Multigraph g = generate_for_cli(n, d, seed, simple);
    save_graph(out_path, g);
    return 0;
}

int cmd_sample(const std::string& graph_path, int n, int d, uint64_t seed, int samples,
               const std::string& method, const std::string& out_dir,
               const std::string& export_green_path) {
    const Multigraph g =
        graph_path.empty() ? generate_for_cli(n, d, seed, false) : load_graph(graph_path);
    const bool needs_green = method == "spectral" || method == "sequential" || !export_green_path.empty();
    if (needs_green && g.n > 4096)
        throw std::runtime_error("dense Green matrix requires n <= 4096");
    gffperc::GreenMatrix green;
    if (needs_green) green = gffperc::green_zero_average(g);
    if (!export_green_path.empty()) {
        std::ofstream out(export_green_path);
        if (!out) throw std::runtime_error("cannot write green file: " + export_green_path);
        gffperc::write_green_csv(out, green);
    }

    std::filesystem::create_directories(out_dir);
    json meta;
    meta["n"] = g.n;
    meta["d"] = g.d;
    meta["method"] = method;
    meta["samples"] = samples;
    meta["seed"] = seed;
    for (int i = 0; i < samples; ++i) {
        Field f;
        if (method == "sparse") {
            gffperc::SparseFieldSampler sampler(g);
            gffperc::Rng rng(gffperc::derive_seed(seed, "field", static_cast<uint64_t>(i)));
            f = sampler.sample(rng);
        } else if (method == "spectral") {
            gffperc::SpectralSampler sampler(g, green);
            gffperc::Rng rng(gffperc::derive_seed(seed, "field", static_cast<uint64_t>(i)));
            f = sampler.sample(rng);
        } else if (method == "sequential") {
            std::vector<int> order(g.n);
            for (int v = 0; v < g.n; ++v) order[v] = v;
            gffperc::GaussianReservoir reservoir(
                gffperc::derive_seed(seed, "reservoir", static_cast<uint64_t>(i)));
            f = gffperc::sample_sequential(g, green, order, reservoir);
        } else {
            throw std::runtime_error("unknown sampling method: " + method);
        }
        const std::string path = out_dir + "/field_" + std::to_string(i) + ".csv";
        write_field_csv(path, f);
        meta["fields"].push_back(path);
        meta["reservoir_seeds"].push_back(
            hex64(gffperc::derive_seed(seed, method == "sequential" ? "reservoir" : "field",
                                       static_cast<uint64_t>(i))));
    }
    std::cout << meta.dump(2) << "\n";
    return 0;
}

int cmd_analyze(const std::string& graph_path, const std::string& field_path, int n, int d,
                uint64_t seed, double level, const std::string& census_path, int census_radius,
                const std::string& distances_path, int64_t pairs) {
    const Multigraph g =
        graph_path.empty() ? generate_for_cli(n, d, seed, false) : load_graph(graph_path);
    Field f;
    if (field_path.empty()) {
        gffperc::SparseFieldSampler sampler(g);
        gffperc::Rng rng(gffperc::derive_seed(seed, {"field"}));
        f = sampler.sample(rng);
    } else {
        f = read_field_csv(field_path);
        if (static_cast<int>(f.values.size()) != g.n)
            throw std::runtime_error("field length does not match graph size");
    }

    const auto comps = gffperc::components(g, gffperc::level_set(f, level), level);
    json out;
    out["level"] = level;
    json sizes = json::array();
    for (size_t i = 0; i < comps.sizes.size() && i < 10; ++i) sizes.push_back(comps.sizes[i]);
    out["sizes"] = sizes;
    if (!comps.components.empty()) {
        const auto& c1 = comps.components[0];
        const gffperc::Subgraph core = gffperc::two_core(g, c1);
        const gffperc::KernelSummary ks = gffperc::kernel(core);
        out["core_size"] = core.vertices.size();
        out["kernel_size"] = ks.vertex_count();
        out["diameter"] = gffperc::diameter(g, c1);
        if (!census_path.empty()) {
            const auto census = gffperc::ball_census(g, c1, census_radius);
            std::ofstream cf(census_path);
            if (!cf) throw std::runtime_error("cannot write census file: " + census_path);
            cf << "code,count\n";
            for (const auto& [code, count] : census) cf << code << "," << count << "\n";
            out["census_file"] = census_path;
        }
        if (!distances_path.empty()) {
            if (c1.size() < 2) throw std::runtime_error("largest component too small for distances");
            gffperc::Rng rng(gffperc::derive_seed(seed, {"pairs"}));
            const auto dists = gffperc::sample_typical_distances(g, c1, pairs, rng);
            std::ofstream df(distances_path);
            if (!df) throw std::runtime_error("cannot write distance file: " + distances_path);
            for (const int dist : dists) df << dist << "\n";
            out["distances_file"] = distances_path;
        }
    } else {
        out["core_size"] = 0;
        out["kernel_size"] = 0;
        out["diameter"] = 0;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_tree(int d, double h, int K, int64_t replicas, uint64_t seed, const std::string& estimator,
             double tol, double lo, double hi) {
    json out;
    out["d"] = d;
    out["h"] = h;
    out["K"] = K;
    out["replicas"] = replicas;
    out["seed"] = seed;
    out["estimator"] = estimator;
    gffperc::Rng rng(gffperc::derive_seed(seed, {"tree", estimator}));
    if (estimator == "eta") {
        const auto eta = gffperc::estimate_eta(d, h, K, replicas, rng);
        out["estimate"] = eta.point_estimate;
        out["std_error"] = eta.std_error;
    } else if (estimator == "lambda") {
        out["estimate"] = gffperc::estimate_lambda(d, h, K, replicas, rng);
        out["std_error"] = 0.0;
    } else if (estimator == "core_kernel") {
        const auto probs = gffperc::estimate_core_kernel_probs(d, h, K, replicas, rng);
        out["estimate"] = probs.k1;
        out["std_error"] = gffperc::binomial_std_error(probs.k1, static_cast<double>(probs.replicas));
        out["k2"] = probs.k2;
        out["k2_std_error"] =
            gffperc::binomial_std_error(probs.k2, static_cast<double>(probs.replicas));
    } else if (estimator == "hstar") {
        const auto interval = gffperc::estimate_h_star(d, tol, K, replicas, rng, lo, hi);
        out["estimate"] = 0.5 * (interval.lo + interval.hi);
        out["std_error"] = 0.5 * (interval.hi - interval.lo);
        out["lo"] = interval.lo;
        out["hi"] = interval.hi;
    } else {
        throw std::runtime_error("unknown estimator: " + estimator);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_explore(int n, int d, double h, double kappa, double lambda_hat, int boundary_floor,
                int64_t replicas, uint64_t seed, const std::string& mode_name,
                const std::string& out_path) {
    gffperc::ExplorationParams params;
    params.kappa = kappa;
    params.lambda_hat = lambda_hat;
    params.boundary_floor = boundary_floor;
    const gffperc::ExploreMode mode =
        mode_name == "lower" ? gffperc::ExploreMode::lower : gffperc::ExploreMode::upper;

    std::ofstream file;
    const bool to_file = !out_path.empty() && out_path != "-";
    if (to_file) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot write outcome log: " + out_path);
    }
    std::ostream& log = to_file ? static_cast<std::ostream&>(file) : std::cout;

    gffperc::LazyGraphState state(n, d);
    int64_t counts[5] = {0, 0, 0, 0, 0};
    const uint64_t base = gffperc::derive_seed(seed, {"explore"});
    for (int64_t r = 0; r < replicas; ++r) {
        const uint64_t rep = gffperc::derive_seed(base, "replica", static_cast<uint64_t>(r));
        gffperc::Rng pair_rng(gffperc::derive_seed(rep, {"pairing"}));
        gffperc::GaussianReservoir reservoir(gffperc::derive_seed(rep, {"field"}));
        state.reset();
        const int x = static_cast<int>(pair_rng.next_below(static_cast<uint64_t>(n)));
        const auto outcome = gffperc::explore_component(state, x, h, params, mode, pair_rng, reservoir);
        counts[static_cast<int>(outcome.verdict)] += 1;
        json rec;
        rec["verdict"] = gffperc::verdict_name(outcome.verdict);
        rec["tree_size"] = outcome.tree_size;
        rec["boundary_size"] = outcome.boundary_size;
        rec["seen_count"] = outcome.seen_count;
        rec["generations"] = outcome.generations;
        rec["seed"] = hex64(rep);
        log << rec.dump() << "\n";
    }
    if (to_file) {
        json summary;
        summary["replicas"] = replicas;
        summary["successful_fraction"] =
            static_cast<double>(counts[static_cast<int>(gffperc::Verdict::successful)]) / replicas;
        for (int v = 0; v < 5; ++v)
            summary["counts"][gffperc::verdict_name(static_cast<gffperc::Verdict>(v))] = counts[v];
        summary["out"] = out_path;
        std::cout << summary.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"level-set percolation laboratory for the zero-average Gaussian free field "
                 "on random regular multigraphs"};
    app.require_subcommand(1);
    // --h is a level parameter below; keep help long-form only.
    app.set_help_flag("--help", "print help");
    app.option_defaults()->always_capture_default();

    // generate
    auto* gen = app.add_subcommand("generate", "draw a configuration-model multigraph");
    gen->set_help_flag("--help", "print help");
    int gen_n = 100, gen_d = 3;
    uint64_t gen_seed = 1;
    bool gen_simple = false;
    std::string gen_out;
    gen->add_option("--n", gen_n, "vertex count")->required();
    gen->add_option("--d", gen_d, "degree");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_flag("--simple", gen_simple, "reject until simple (no loops or multi-edges)");
    gen->add_option("--out", gen_out, "edge-list file (default stdout)");

    // sample
    auto* smp = app.add_subcommand("sample", "sample zero-average fields on a graph");
    smp->set_help_flag("--help", "print help");
    std::string smp_graph, smp_method = "sparse", smp_out = ".", smp_green;
    int smp_n = 100, smp_d = 3, smp_samples = 1;
    uint64_t smp_seed = 1;
    smp->add_option("--graph", smp_graph, "edge-list file (else generated from --n/--d/--seed)");
    smp->add_option("--n", smp_n, "vertex count when generating");
    smp->add_option("--d", smp_d, "degree when generating");
    smp->add_option("--seed", smp_seed, "master seed");
    smp->add_option("--samples", smp_samples, "number of fields");
    smp->add_option("--method", smp_method, "sparse | spectral | sequential")
        ->check(CLI::IsMember({"sparse", "spectral", "sequential"}));
    smp->add_option("--out", smp_out, "output directory");
    smp->add_option("--export-green", smp_green, "write the dense Green matrix CSV here");

    // analyze
    auto* ana = app.add_subcommand("analyze", "level-set component statistics of a field");
    ana->set_help_flag("--help", "print help");
    std::string ana_graph, ana_field, ana_census, ana_dist;
    int ana_n = 100, ana_d = 3, ana_census_radius = 2;
    int64_t ana_pairs = 1000;
    uint64_t ana_seed = 1;
    double ana_level = 0.0;
    ana->add_option("--graph", ana_graph, "edge-list file (else generated)");
    ana->add_option("--field", ana_field, "field CSV (else sampled)");
    ana->add_option("--n", ana_n, "vertex count when generating");
    ana->add_option("--d", ana_d, "degree when generating");
    ana->add_option("--seed", ana_seed, "master seed");
    ana->add_option("--h,--level", ana_level, "level h");
    ana->add_option("--census", ana_census, "write the largest component's ball census here");
    ana->add_option("--census-radius", ana_census_radius, "census ball radius");
    ana->add_option("--distances", ana_dist, "write sampled intra-component distances here");
    ana->add_option("--pairs", ana_pairs, "distance pairs to sample");

    // tree
    auto* tre = app.add_subcommand("tree", "branching-process estimators on the d-regular tree");
    tre->set_help_flag("--help", "print help");
    int tre_d = 3, tre_K = 24;
    int64_t tre_reps = 20000;
    uint64_t tre_seed = 1;
    double tre_h = 0.0, tre_tol = 0.05, tre_lo = 0.0, tre_hi = 4.0;
    std::string tre_est = "eta";
    tre->add_option("--d", tre_d, "degree");
    tre->add_option("--h", tre_h, "level");
    tre->add_option("--K", tre_K, "generation horizon");
    tre->add_option("--replicas", tre_reps, "Monte Carlo replicas");
    tre->add_option("--seed", tre_seed, "master seed");
    tre->add_option("--estimator", tre_est, "eta | lambda | core_kernel | hstar")
        ->check(CLI::IsMember({"eta", "lambda", "core_kernel", "hstar"}));
    tre->add_option("--tol", tre_tol, "bracket width for hstar");
    tre->add_option("--lo", tre_lo, "bisection lower bound for hstar");
    tre->add_option("--hi", tre_hi, "bisection upper bound for hstar");

    // explore
    auto* exp = app.add_subcommand("explore", "lazy cluster explorations with outcome log");
    exp->set_help_flag("--help", "print help");
    int exp_n = 10000, exp_d = 3, exp_floor = 16;
    int64_t exp_reps = 100;
    uint64_t exp_seed = 1;
    double exp_h = 0.0, exp_kappa = 0.25, exp_lambda = 1.4;
    std::string exp_mode = "upper", exp_out;
    exp->add_option("--n", exp_n, "vertex count")->required();
    exp->add_option("--d", exp_d, "degree");
    exp->add_option("--h", exp_h, "level");
    exp->add_option("--kappa", exp_kappa, "security-radius coefficient");
    exp->add_option("--lambda-hat", exp_lambda, "growth-rate estimate for the generation cap");
    exp->add_option("--boundary-floor", exp_floor, "minimum boundary target");
    exp->add_option("--replicas", exp_reps, "independent explorations");
    exp->add_option("--seed", exp_seed, "master seed");
    exp->add_option("--mode", exp_mode, "upper | lower")
        ->check(CLI::IsMember({"upper", "lower"}));
    exp->add_option("--out", exp_out, "JSON-lines outcome log (default stdout)");

    // experiment / sweep
    auto* xpr = app.add_subcommand("experiment", "run a configured experiment");
    xpr->set_help_flag("--help", "print help");
    auto* swp = app.add_subcommand("sweep", "run an experiment per parameter value");
    swp->set_help_flag("--help", "print help");
    std::string cfg_path, cfg_kind, cfg_n_list, cfg_out;
    int cfg_d = 0, cfg_K = 0, cfg_census_radius = -1, cfg_floor = 0, cfg_threads = -1;
    int64_t cfg_reps = 0, cfg_tree_reps = 0, cfg_pairs = 0;
    uint64_t cfg_seed = 0;
    double cfg_h = 0.0, cfg_kappa = -1.0, cfg_lambda = -1.0;
    std::string swp_param, swp_values;
    for (CLI::App* sub : {xpr, swp}) {
        sub->add_option("--config", cfg_path, "TOML config file");
        sub->add_option("--kind", cfg_kind, "experiment kind");
        sub->add_option("--d", cfg_d, "degree");
        sub->add_option("--h", cfg_h, "level");
        sub->add_option("--n", cfg_n_list, "comma-separated n grid");
        sub->add_option("--replicas", cfg_reps, "replicas per n");
        sub->add_option("--seed", cfg_seed, "master seed");
        sub->add_option("--kappa", cfg_kappa, "exploration kappa");
        sub->add_option("--lambda-hat", cfg_lambda, "exploration lambda");
        sub->add_option("--K", cfg_K, "tree generation horizon");
        sub->add_option("--tree-replicas", cfg_tree_reps, "tree-side replicas");
        sub->add_option("--census-radius", cfg_census_radius, "local-limit ball radius");
        sub->add_option("--distance-pairs", cfg_pairs, "typical-distance pairs per replica");
        sub->add_option("--boundary-floor", cfg_floor, "exploration boundary floor");
        sub->add_option("--threads", cfg_threads, "worker count (0 = all cores)");
        sub->add_option("--out", cfg_out, "output directory");
    }
    swp->add_option("--param", swp_param, "parameter to sweep")->required();
    swp->add_option("--values", swp_values, "comma-separated values")->required();

    try {
        app.parse(argc, argv);

        if (*gen) return cmd_generate(gen_n, gen_d, gen_seed, gen_simple, gen_out);
        if (*smp)
            return cmd_sample(smp_graph, smp_n, smp_d, smp_seed, smp_samples, smp_method, smp_out,
                              smp_green);
        if (*ana)
            return cmd_analyze(ana_graph, ana_field, ana_n, ana_d, ana_seed, ana_level, ana_census,
                               ana_census_radius, ana_dist, ana_pairs);
        if (*tre)
            return cmd_tree(tre_d, tre_h, tre_K, tre_reps, tre_seed, tre_est, tre_tol, tre_lo,
                            tre_hi);
        if (*exp)
            return cmd_explore(exp_n, exp_d, exp_h, exp_kappa, exp_lambda, exp_floor, exp_reps,
                               exp_seed, exp_mode, exp_out);

        if (*xpr || *swp) {
            CLI::App* sub = *xpr ? xpr : swp;
            gffperc::ExperimentConfig cfg;
            if (sub->count("--config")) cfg = gffperc::config_from_toml(gffperc::parse_toml_file(cfg_path));
            if (sub->count("--kind")) cfg.kind = cfg_kind;
            if (sub->count("--d")) cfg.d = cfg_d;
            if (sub->count("--h")) cfg.h = cfg_h;
            if (sub->count("--n")) gffperc::apply_parameter(cfg, "n", cfg_n_list);
            if (sub->count("--replicas")) cfg.replicas = cfg_reps;
            if (sub->count("--seed")) cfg.seed = cfg_seed;
            if (sub->count("--kappa")) cfg.kappa = cfg_kappa;
            if (sub->count("--lambda-hat")) cfg.lambda_hat = cfg_lambda;
            if (sub->count("--K")) cfg.K = cfg_K;
            if (sub->count("--tree-replicas")) cfg.tree_replicas = cfg_tree_reps;
            if (sub->count("--census-radius")) cfg.census_radius = cfg_census_radius;
            if (sub->count("--distance-pairs")) cfg.distance_pairs = cfg_pairs;
            if (sub->count("--boundary-floor")) cfg.boundary_floor = cfg_floor;
            if (sub->count("--threads")) cfg.threads = cfg_threads;
            if (sub->count("--out")) cfg.out_dir = cfg_out;

            if (*xpr) {
                const auto result = gffperc::run_experiment(cfg);
                json out;
                out["out_dir"] = cfg.out_dir;
                out["config_hash"] = hex64(result.hash);
                out["summary"] = result.summary;
                std::cout << out.dump(2) << "\n";
                return 0;
            }
            std::vector<std::string> values;
            std::istringstream vs(swp_values);
            std::string tok;
            while (std::getline(vs, tok, ','))
                if (!tok.empty()) values.push_back(tok);
            const auto results = gffperc::sweep(cfg, swp_param, values);
            json out = json::array();
            for (size_t i = 0; i < results.size(); ++i) {
                json rec;
                rec["value"] = values[i];
                rec["out_dir"] = results[i].config.out_dir;
                rec["config_hash"] = hex64(results[i].hash);
                out.push_back(rec);
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
