#include "gffperc/harness.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "gffperc/exploration.hpp"
#include "gffperc/gff.hpp"
#include "gffperc/green.hpp"
#include "gffperc/levelset.hpp"
#include "gffperc/multigraph.hpp"
#include "gffperc/rng.hpp"
#include "gffperc/stats.hpp"
#include "gffperc/tree_process.hpp"

namespace gffperc {

namespace {

// ---------------------------------------------------------------- toml ----

std::string trim(const std::string& s) {
    size_t a = 0;
    size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        else if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool looks_integer(const std::string& tok) {
    size_t i = (tok[0] == '+' || tok[0] == '-') ? 1 : 0;
    if (i == tok.size()) return false;
    for (size_t j = i; j < tok.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(tok[j]))) return false;
    return true;
}

bool parse_real(const std::string& tok, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(tok, &pos);
        return pos == tok.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::string parse_quoted(const std::string& tok, int line_no) {
    if (tok.size() < 2 || tok.back() != '"')
        throw std::runtime_error("toml: line " + std::to_string(line_no) + ": unterminated string");
    std::string out;
    for (size_t i = 1; i + 1 < tok.size(); ++i) {
        char c = tok[i];
        if (c == '\\' && i + 2 < tok.size()) {
            const char e = tok[++i];
            if (e == 'n') c = '\n';
            else if (e == 't') c = '\t';
            else c = e;  // \" \\ and anything else literal
        }
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> split_array(const std::string& inner) {
    std::vector<std::string> parts;
    std::string cur;
    bool in_string = false;
    for (size_t i = 0; i < inner.size(); ++i) {
        const char c = inner[i];
        if (c == '"' && (i == 0 || inner[i - 1] != '\\')) in_string = !in_string;
        if (c == ',' && !in_string) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    const std::string last = trim(cur);
    if (!last.empty()) parts.push_back(last);
    return parts;
}

void store_value(TomlTable& table, const std::string& key, const std::string& tok, int line_no) {
    if (tok.empty()) throw std::runtime_error("toml: line " + std::to_string(line_no) + ": empty value");
    if (tok.front() == '"') {
        table.strings[key] = parse_quoted(tok, line_no);
        return;
    }
    if (tok == "true" || tok == "false") {
        table.bools[key] = (tok == "true");
        return;
    }
    if (tok.front() == '[') {
        if (tok.back() != ']')
            throw std::runtime_error("toml: line " + std::to_string(line_no) + ": unterminated array");
        const auto parts = split_array(tok.substr(1, tok.size() - 2));
        bool all_int = true, all_num = true, all_str = true;
        for (const auto& p : parts) {
            if (p.empty())
                throw std::runtime_error("toml: line " + std::to_string(line_no) + ": empty array element");
            const bool is_str = p.front() == '"';
            double dummy = 0.0;
            const bool is_int = !is_str && looks_integer(p);
            const bool is_num = !is_str && parse_real(p, dummy);
            all_str &= is_str;
            all_int &= is_int;
            all_num &= is_num;
        }
        if (all_str && !parts.empty()) {
            auto& arr = table.string_arrays[key];
            for (const auto& p : parts) arr.push_back(parse_quoted(p, line_no));
        } else if (all_int) {
            auto& arr = table.int_arrays[key];
            for (const auto& p : parts) arr.push_back(std::stoll(p));
        } else if (all_num) {
            auto& arr = table.double_arrays[key];
            for (const auto& p : parts) {
                double v = 0.0;
                parse_real(p, v);
                arr.push_back(v);
            }
        } else {
            throw std::runtime_error("toml: line " + std::to_string(line_no) + ": mixed array types");
        }
        return;
    }
    if (looks_integer(tok)) {
        table.ints[key] = std::stoll(tok);
        return;
    }
    double v = 0.0;
    if (parse_real(tok, v)) {
        table.doubles[key] = v;
        return;
    }
    throw std::runtime_error("toml: line " + std::to_string(line_no) + ": cannot parse value '" + tok + "'");
}

// --------------------------------------------------------------- format ----

std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

// ----------------------------------------------------------- TomlTable ----

bool TomlTable::has(const std::string& key) const {
    return ints.count(key) || doubles.count(key) || bools.count(key) || strings.count(key) ||
           int_arrays.count(key) || double_arrays.count(key) || string_arrays.count(key);
}

int64_t TomlTable::get_int(const std::string& key, int64_t fallback) const {
    const auto it = ints.find(key);
    return it == ints.end() ? fallback : it->second;
}

double TomlTable::get_double(const std::string& key, double fallback) const {
    const auto it = doubles.find(key);
    if (it != doubles.end()) return it->second;
    const auto ii = ints.find(key);
    return ii == ints.end() ? fallback : static_cast<double>(ii->second);
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
    const auto it = bools.find(key);
    return it == bools.end() ? fallback : it->second;
}

std::string TomlTable::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = strings.find(key);
    return it == strings.end() ? fallback : it->second;
}

std::vector<int64_t> TomlTable::get_int_array(const std::string& key) const {
    const auto it = int_arrays.find(key);
    if (it != int_arrays.end()) return it->second;
    const auto ii = ints.find(key);  // scalar accepted as 1-element grid
    if (ii != ints.end()) return {ii->second};
    return {};
}

std::vector<double> TomlTable::get_double_array(const std::string& key) const {
    const auto it = double_arrays.find(key);
    if (it != double_arrays.end()) return it->second;
    std::vector<double> out;
    for (const int64_t v : get_int_array(key)) out.push_back(static_cast<double>(v));
    return out;
}

std::vector<std::string> TomlTable::get_string_array(const std::string& key) const {
    const auto it = string_arrays.find(key);
    return it == string_arrays.end() ? std::vector<std::string>{} : it->second;
}

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    std::istringstream in(text);
    std::string raw;
    std::string prefix;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("toml: line " + std::to_string(line_no) + ": bad section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw std::runtime_error("toml: line " + std::to_string(line_no) + ": empty section name");
            prefix = name + ".";
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("toml: line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("toml: line " + std::to_string(line_no) + ": empty key");
        for (const char c : key)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
                throw std::runtime_error("toml: line " + std::to_string(line_no) + ": bad key '" + key + "'");
        store_value(table, prefix + key, value, line_no);
    }
    return table;
}

TomlTable parse_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_toml(buf.str());
}

// -------------------------------------------------------------- config ----

namespace {

const std::set<std::string> kKinds = {"giant_fraction", "second_component", "core_kernel",
                                      "diameter",       "typical_distance", "local_limit",
                                      "tree_estimates", "green_validation"};

// Flat key or its "experiment."-prefixed variant.
std::string resolve_key(const TomlTable& t, const std::string& key) {
    const std::string scoped = "experiment." + key;
    if (t.has(scoped)) return scoped;
    if (t.has(key)) return key;
    return {};
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
    if (!kKinds.count(cfg.kind))
        throw std::invalid_argument("config: unknown experiment kind '" + cfg.kind + "'");
    if (cfg.d < 3) throw std::invalid_argument("config: d must be >= 3");
    if (cfg.replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
    if (cfg.n_grid.empty()) throw std::invalid_argument("config: empty n grid");
    for (const int n : cfg.n_grid) {
        if (n < 2) throw std::invalid_argument("config: n must be >= 2");
        if ((static_cast<int64_t>(n) * cfg.d) % 2 != 0)
            throw std::invalid_argument("config: n*d must be even (n=" + std::to_string(n) + ", d=" +
                                        std::to_string(cfg.d) + ")");
        if (cfg.kind == "green_validation" && n > 4096)
            throw std::invalid_argument("config: green_validation needs n <= 4096 (dense Green matrix)");
    }
    if (cfg.K < 2) throw std::invalid_argument("config: K must be >= 2");
    if (cfg.kappa < 0.0) throw std::invalid_argument("config: kappa must be >= 0");
    if (cfg.lambda_hat != 0.0 && cfg.lambda_hat <= 1.0)
        throw std::invalid_argument("config: lambda_hat must be 0 (auto) or > 1");
    if (cfg.tree_replicas < 1) throw std::invalid_argument("config: tree_replicas must be >= 1");
    if (cfg.census_radius < 0) throw std::invalid_argument("config: census_radius must be >= 0");
    if (cfg.distance_pairs < 1) throw std::invalid_argument("config: distance_pairs must be >= 1");
    if (cfg.boundary_floor < 1) throw std::invalid_argument("config: boundary_floor must be >= 1");
    if (cfg.threads < 0) throw std::invalid_argument("config: threads must be >= 0");
}

ExperimentConfig config_from_toml(const TomlTable& table) {
    ExperimentConfig cfg;
    const auto key = [&](const char* k) { return resolve_key(table, k); };
    if (const auto k = key("kind"); !k.empty()) cfg.kind = table.get_string(k, cfg.kind);
    if (const auto k = key("d"); !k.empty()) cfg.d = static_cast<int>(table.get_int(k, cfg.d));
    if (const auto k = key("h"); !k.empty()) cfg.h = table.get_double(k, cfg.h);
    std::string grid_key = key("n");
    if (grid_key.empty()) grid_key = key("n_grid");
    if (!grid_key.empty()) {
        cfg.n_grid.clear();
        for (const int64_t n : table.get_int_array(grid_key)) cfg.n_grid.push_back(static_cast<int>(n));
    }
    if (const auto k = key("replicas"); !k.empty())
        cfg.replicas = table.get_int(k, cfg.replicas);
    if (const auto k = key("seed"); !k.empty())
        cfg.seed = static_cast<uint64_t>(table.get_int(k, static_cast<int64_t>(cfg.seed)));
    if (const auto k = key("kappa"); !k.empty()) cfg.kappa = table.get_double(k, cfg.kappa);
    if (const auto k = key("lambda_hat"); !k.empty())
        cfg.lambda_hat = table.get_double(k, cfg.lambda_hat);
    if (const auto k = key("K"); !k.empty()) cfg.K = static_cast<int>(table.get_int(k, cfg.K));
    if (const auto k = key("tree_replicas"); !k.empty())
        cfg.tree_replicas = table.get_int(k, cfg.tree_replicas);
    if (const auto k = key("census_radius"); !k.empty())
        cfg.census_radius = static_cast<int>(table.get_int(k, cfg.census_radius));
    if (const auto k = key("distance_pairs"); !k.empty())
        cfg.distance_pairs = table.get_int(k, cfg.distance_pairs);
    if (const auto k = key("boundary_floor"); !k.empty())
        cfg.boundary_floor = static_cast<int>(table.get_int(k, cfg.boundary_floor));
    if (const auto k = key("threads"); !k.empty())
        cfg.threads = static_cast<int>(table.get_int(k, cfg.threads));
    if (const auto k = key("out_dir"); !k.empty()) cfg.out_dir = table.get_string(k, cfg.out_dir);
    return cfg;
}

void apply_parameter(ExperimentConfig& cfg, const std::string& name, const std::string& value) {
    const auto as_int = [&](const std::string& v) {
        size_t pos = 0;
        const int64_t out = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("config: bad integer '" + v + "'");
        return out;
    };
    const auto as_double = [&](const std::string& v) {
        size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("config: bad number '" + v + "'");
        return out;
    };
    if (name == "kind") cfg.kind = value;
    else if (name == "d") cfg.d = static_cast<int>(as_int(value));
    else if (name == "h") cfg.h = as_double(value);
    else if (name == "n") {
        cfg.n_grid.clear();
        std::istringstream in(value);
        std::string tok;
        while (std::getline(in, tok, ','))
            if (!trim(tok).empty()) cfg.n_grid.push_back(static_cast<int>(as_int(trim(tok))));
        if (cfg.n_grid.empty()) throw std::invalid_argument("config: empty n list");
    } else if (name == "replicas") cfg.replicas = as_int(value);
    else if (name == "seed") cfg.seed = static_cast<uint64_t>(as_int(value));
    else if (name == "kappa") cfg.kappa = as_double(value);
    else if (name == "lambda_hat") cfg.lambda_hat = as_double(value);
    else if (name == "K") cfg.K = static_cast<int>(as_int(value));
    else if (name == "tree_replicas") cfg.tree_replicas = as_int(value);
    else if (name == "census_radius") cfg.census_radius = static_cast<int>(as_int(value));
    else if (name == "distance_pairs") cfg.distance_pairs = as_int(value);
    else if (name == "boundary_floor") cfg.boundary_floor = static_cast<int>(as_int(value));
    else if (name == "threads") cfg.threads = static_cast<int>(as_int(value));
    else if (name == "out_dir") cfg.out_dir = value;
    else throw std::invalid_argument("config: unknown parameter '" + name + "'");
}

std::string canonical_config_string(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "kind=" << cfg.kind << "|d=" << cfg.d << "|h=" << format_g17(cfg.h) << "|n=";
    for (size_t i = 0; i < cfg.n_grid.size(); ++i) out << (i ? "," : "") << cfg.n_grid[i];
    out << "|replicas=" << cfg.replicas << "|seed=" << cfg.seed << "|kappa=" << format_g17(cfg.kappa)
        << "|lambda_hat=" << format_g17(cfg.lambda_hat) << "|K=" << cfg.K
        << "|tree_replicas=" << cfg.tree_replicas << "|census_radius=" << cfg.census_radius
        << "|distance_pairs=" << cfg.distance_pairs << "|boundary_floor=" << cfg.boundary_floor;
    return out.str();
}

uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a64(canonical_config_string(cfg)); }

// ---------------------------------------------------------------- pool ----

void parallel_replicas(int64_t count, int threads, const std::function<void(int64_t)>& body) {
    if (count <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = static_cast<int>(std::min<int64_t>(workers, count));
    if (workers == 1) {
        for (int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int64_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::exception_ptr first_error;
    const auto drain = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const int64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 0; w < workers - 1; ++w) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ----------------------------------------------------------- experiment ----

namespace {

Multigraph make_connected_graph(int n, int d, uint64_t seed) {
    // The zero-average field and the component statistics presume a connected
    // graph; the rare disconnected multigraph (possible at small n) is redrawn.
    for (uint64_t attempt = 0; attempt < 100; ++attempt) {
        Rng rng(derive_seed(seed, "graph", attempt));
        Multigraph g = generate_configuration_model(n, d, rng);
        if (is_connected(g)) return g;
    }
    throw std::runtime_error("experiment: failed to draw a connected multigraph");
}

struct ReplicaGraphField {
    Multigraph g;
    Field f;
};

ReplicaGraphField make_replica(int n, int d, uint64_t seed) {
    ReplicaGraphField rep;
    rep.g = make_connected_graph(n, d, seed);
    SparseFieldSampler sampler(rep.g);
    Rng frng(derive_seed(seed, {"field"}));
    rep.f = sampler.sample(frng);
    return rep;
}

std::vector<ReplicaRow> run_grid(const ExperimentConfig& cfg, size_t ncols,
                                 const std::function<void(int, int64_t, uint64_t, ReplicaRow&)>& one) {
    const int64_t total = static_cast<int64_t>(cfg.n_grid.size()) * cfg.replicas;
    std::vector<ReplicaRow> rows(static_cast<size_t>(total));
    parallel_replicas(total, cfg.threads, [&](int64_t j) {
        const int n = cfg.n_grid[static_cast<size_t>(j / cfg.replicas)];
        const int64_t r = j % cfg.replicas;
        ReplicaRow& row = rows[static_cast<size_t>(j)];
        row.n = n;
        row.replica = r;
        row.values.assign(ncols, 0.0);
        one(n, r, derive_seed(cfg.seed, {cfg.kind, std::to_string(n), std::to_string(r)}), row);
    });
    return rows;
}

double safe_std_error(const std::vector<double>& xs) {
    return xs.size() < 2 ? 0.0 : std_error(xs);
}

std::vector<double> column_values(const ExperimentResult& res, size_t col, int n) {
    std::vector<double> out;
    for (const auto& row : res.rows)
        if (row.n == n) out.push_back(row.values[col]);
    return out;
}

std::string nkey(int n, const std::string& suffix) {
    return "n" + std::to_string(n) + "." + suffix;
}

PlotSeries column_plot(const ExperimentResult& res, size_t col, const std::string& name) {
    PlotSeries p;
    p.name = name;
    for (const int n : res.config.n_grid) {
        const auto vals = column_values(res, col, n);
        p.points.push_back({static_cast<double>(n), mean(vals), safe_std_error(vals)});
    }
    return p;
}

void run_giant_fraction(const ExperimentConfig& cfg, ExperimentResult& res) {
    res.columns = {"c1_frac", "c2_size", "simple"};
    res.rows = run_grid(cfg, res.columns.size(), [&](int n, int64_t, uint64_t seed, ReplicaRow& row) {
        const auto rep = make_replica(n, cfg.d, seed);
        const auto comps = components(rep.g, level_set(rep.f, cfg.h), cfg.h);
        row.values[0] = comps.sizes.empty() ? 0.0 : static_cast<double>(comps.sizes[0]) / n;
        row.values[1] = comps.sizes.size() > 1 ? static_cast<double>(comps.sizes[1]) : 0.0;
        row.values[2] = is_simple(rep.g) ? 1.0 : 0.0;
    });
    Rng tree_rng(derive_seed(cfg.seed, {"tree-eta"}));
    const EtaEstimate eta = estimate_eta(cfg.d, cfg.h, cfg.K, cfg.tree_replicas, tree_rng);
    res.summary["eta_hat"] = eta.point_estimate;
    res.summary["eta_hat_stderr"] = eta.std_error;
    for (const int n : cfg.n_grid) {
        const auto vals = column_values(res, 0, n);
        res.summary[nkey(n, "c1_frac_mean")] = mean(vals);
        res.summary[nkey(n, "c1_frac_stderr")] = safe_std_error(vals);
        res.summary[nkey(n, "c1_frac_vs_eta_gap")] = std::fabs(mean(vals) - eta.point_estimate);
        res.summary[nkey(n, "c2_mean")] = mean(column_values(res, 1, n));
    }
    res.plots.push_back(column_plot(res, 0, "c1_frac"));
}

void run_second_component(const ExperimentConfig& cfg, ExperimentResult& res) {
    res.columns = {"c2_size", "c2_over_logn"};
    res.rows = run_grid(cfg, res.columns.size(), [&](int n, int64_t, uint64_t seed, ReplicaRow& row) {
        const auto rep = make_replica(n, cfg.d, seed);
        const auto comps = components(rep.g, level_set(rep.f, cfg.h), cfg.h);
        const double c2 = comps.sizes.size() > 1 ? static_cast<double>(comps.sizes[1]) : 0.0;
        row.values[0] = c2;
        row.values[1] = c2 / std::log(static_cast<double>(n));
    });
    std::vector<double> log_ns, medians;
    for (const int n : cfg.n_grid) {
        const auto vals = column_values(res, 0, n);
        const double med = median(vals);
        res.summary[nkey(n, "c2_median")] = med;
        res.summary[nkey(n, "c2_mean")] = mean(vals);
        res.summary[nkey(n, "c2_over_logn_median")] = med / std::log(static_cast<double>(n));
        log_ns.push_back(std::log(static_cast<double>(n)));
        medians.push_back(med);
    }
    if (cfg.n_grid.size() >= 2) {
        const LinearFit fit = linear_fit(log_ns, medians);
        res.summary["fit_slope"] = fit.slope;
        res.summary["fit_intercept"] = fit.intercept;
        res.summary["fit_r2"] = fit.r2;
    }
    res.plots.push_back(column_plot(res, 0, "c2_size"));
}

void run_core_kernel(const ExperimentConfig& cfg, ExperimentResult& res) {
    res.columns = {"c1_size", "core_frac", "kernel_frac"};
    res.rows = run_grid(cfg, res.columns.size(), [&](int n, int64_t, uint64_t seed, ReplicaRow& row) {
        const auto rep = make_replica(n, cfg.d, seed);
        const auto comps = components(rep.g, level_set(rep.f, cfg.h), cfg.h);
        if (comps.components.empty()) return;
        const auto& c1 = comps.components[0];
        const Subgraph core = two_core(rep.g, c1);
        const KernelSummary ks = kernel(core);
        row.values[0] = static_cast<double>(c1.size());
        row.values[1] = static_cast<double>(core.vertices.size()) / n;
        row.values[2] = static_cast<double>(ks.vertex_count()) / n;
    });
    Rng tree_rng(derive_seed(cfg.seed, {"tree-core"}));
    const CoreKernelProbs probs =
        estimate_core_kernel_probs(cfg.d, cfg.h, cfg.K, cfg.tree_replicas, tree_rng);
    res.summary["k1_hat"] = probs.k1;
    res.summary["k2_hat"] = probs.k2;
    for (const int n : cfg.n_grid) {
        const auto core_vals = column_values(res, 1, n);
        const auto kern_vals = column_values(res, 2, n);
        res.summary[nkey(n, "core_frac_mean")] = mean(core_vals);
        res.summary[nkey(n, "core_frac_stderr")] = safe_std_error(core_vals);
        res.summary[nkey(n, "kernel_frac_mean")] = mean(kern_vals);
        res.summary[nkey(n, "kernel_frac_stderr")] = safe_std_error(kern_vals);
        res.summary[nkey(n, "core_frac_vs_k1_gap")] = std::fabs(mean(core_vals) - probs.k1);
        res.summary[nkey(n, "kernel_frac_vs_k2_gap")] = std::fabs(mean(kern_vals) - probs.k2);
    }
    res.plots.push_back(column_plot(res, 1, "core_frac"));
    res.plots.push_back(column_plot(res, 2, "kernel_frac"));
}

void run_diameter(const ExperimentConfig& cfg, ExperimentResult& res) {
    res.columns = {"c1_size", "diameter", "diam_over_logn"};
    res.rows = run_grid(cfg, res.columns.size(), [&](int n, int64_t, uint64_t seed, ReplicaRow& row) {
        const auto rep = make_replica(n, cfg.d, seed);
        const auto comps = components(rep.g, level_set(rep.f, cfg.h), cfg.h);
        if (comps.components.empty()) return;
        const auto& c1 = comps.components[0];
        const int diam = diameter(rep.g, c1);
        row.values[0] = static_cast<double>(c1.size());
        row.values[1] = static_cast<double>(diam);
        row.values[2] = diam / std::log(static_cast<double>(n));
    });
    for (const int n : cfg.n_grid) {
        const auto vals = column_values(res, 1, n);
        res.summary[nkey(n, "diameter_mean")] = mean(vals);
        res.summary[nkey(n, "diameter_stderr")] = safe_std_error(vals);
        res.summary[nkey(n, "diam_over_logn_mean")] = mean(column_values(res, 2, n));
    }
    res.plots.push_back(column_plot(res, 1, "diameter"));
}

void run_typical_distance(const ExperimentConfig& cfg, ExperimentResult& res) {
    res.columns = {"c1_size", "median_distance", "mean_distance"};
    res.rows = run_grid(cfg, res.columns.size(), [&](int n, int64_t, uint64_t seed, ReplicaRow& row) {
        const auto rep = make_replica(n, cfg.d, seed);
        const auto comps = components(rep.g, level_set(rep.f, cfg.h), cfg.h);
        if (comps.components.empty() || comps.components[0].size() < 2) return;
        const auto& c1 = comps.components[0];
        Rng pair_rng(derive_seed(seed, {"pairs"}));
        const auto dists = sample_typical_distances(rep.g, c1, cfg.distance_pairs, pair_rng);
        std::vector<double> dd(dists.begin(), dists.end());
        row.values[0] = static_cast<double>(c1.size());
        row.values[1] = median(dd);
        row.values[2] = mean(dd);
    });
    Rng tree_rng(derive_seed(cfg.seed, {"tree-lambda"}));
    const double lambda = cfg.lambda_hat > 1.0
                              ? cfg.lambda_hat
                              : estimate_lambda(cfg.d, cfg.h, cfg.K,
                                                std::min<int64_t>(cfg.tree_replicas, 4000), tree_rng);
    res.summary["lambda0_hat"] = lambda;
    for (const int n : cfg.n_grid) {
        const auto meds = column_values(res, 1, n);
        res.summary[nkey(n, "median_distance_mean")] = mean(meds);
        res.summary[nkey(n, "distance_ratio")] =
            mean(meds) / (std::log(static_cast<double>(n)) / std::log(lambda));
    }
    res.plots.push_back(column_plot(res, 1, "median_distance"));
}

void run_local_limit(const ExperimentConfig& cfg, ExperimentResult& res) {
    res.columns = {"c1_size", "tree_balls", "nontree_balls"};
    const int64_t total = static_cast<int64_t>(cfg.n_grid.size()) * cfg.replicas;
    std::vector<std::map<std::string, int64_t>> per_job(static_cast<size_t>(total));
    res.rows = run_grid(cfg, res.columns.size(), [&](int n, int64_t r, uint64_t seed, ReplicaRow& row) {
        const auto rep = make_replica(n, cfg.d, seed);
        const auto comps = components(rep.g, level_set(rep.f, cfg.h), cfg.h);
        if (comps.components.empty()) return;
        const auto& c1 = comps.components[0];
        auto census = ball_census(rep.g, c1, cfg.census_radius);
        int64_t tree_balls = 0;
        int64_t nontree = 0;
        for (const auto& [code, count] : census) {
            if (code == kNonTreeBallKey) nontree += count;
            else tree_balls += count;
        }
        row.values[0] = static_cast<double>(c1.size());
        row.values[1] = static_cast<double>(tree_balls);
        row.values[2] = static_cast<double>(nontree);
        const size_t grid_index =
            std::find(cfg.n_grid.begin(), cfg.n_grid.end(), n) - cfg.n_grid.begin();
        per_job[grid_index * cfg.replicas + r] = std::move(census);
    });
    for (const auto& census : per_job)
        for (const auto& [code, count] : census) res.census[code] += count;
    int64_t census_total = 0;
    for (const auto& [code, count] : res.census) census_total += count;
    Rng tree_rng(derive_seed(cfg.seed, {"tree-census"}));
    const auto tree_dist = conditioned_ball_distribution(cfg.d, cfg.h, cfg.census_radius, cfg.K,
                                                         cfg.tree_replicas, tree_rng);
    double tv = 0.0;
    std::set<std::string> codes;
    for (const auto& [code, count] : res.census) codes.insert(code);
    for (const auto& [code, prob] : tree_dist) codes.insert(code);
    for (const auto& code : codes) {
        const auto emp = res.census.find(code);
        const double p_emp =
            emp == res.census.end() ? 0.0 : static_cast<double>(emp->second) / census_total;
        const auto th = tree_dist.find(code);
        const double p_tree = th == tree_dist.end() ? 0.0 : th->second;
        tv += std::fabs(p_emp - p_tree);
    }
    res.summary["tv_distance"] = 0.5 * tv;
    res.summary["census_total"] = static_cast<double>(census_total);
    res.summary["distinct_codes"] = static_cast<double>(res.census.size());
}

void run_tree_estimates(const ExperimentConfig& cfg, ExperimentResult& res) {
    res.columns = {"estimate", "std_error"};
    Rng eta_rng(derive_seed(cfg.seed, {"tree", "eta"}));
    const EtaEstimate eta = estimate_eta(cfg.d, cfg.h, cfg.K, cfg.tree_replicas, eta_rng);
    Rng lambda_rng(derive_seed(cfg.seed, {"tree", "lambda"}));
    const double lambda = estimate_lambda(cfg.d, cfg.h, cfg.K,
                                          std::min<int64_t>(cfg.tree_replicas, 4000), lambda_rng);
    Rng core_rng(derive_seed(cfg.seed, {"tree", "core"}));
    const CoreKernelProbs probs =
        estimate_core_kernel_probs(cfg.d, cfg.h, cfg.K, cfg.tree_replicas, core_rng);
    const double k1_se = binomial_std_error(probs.k1, static_cast<double>(probs.replicas));
    const double k2_se = binomial_std_error(probs.k2, static_cast<double>(probs.replicas));
    res.rows = {{0, 0, {eta.point_estimate, eta.std_error}},
                {0, 1, {lambda, 0.0}},
                {0, 2, {probs.k1, k1_se}},
                {0, 3, {probs.k2, k2_se}}};
    res.summary["eta_hat"] = eta.point_estimate;
    res.summary["eta_stderr"] = eta.std_error;
    res.summary["lambda_hat"] = lambda;
    res.summary["k1_hat"] = probs.k1;
    res.summary["k1_stderr"] = k1_se;
    res.summary["k2_hat"] = probs.k2;
    res.summary["k2_stderr"] = k2_se;
}

void run_green_validation(const ExperimentConfig& cfg, ExperimentResult& res) {
    res.columns = {"spectral_gap",    "green_diag_error", "green_offdiag_error",
                   "tree_like_count", "max_cycles",       "simple"};
    res.rows = run_grid(cfg, res.columns.size(), [&](int n, int64_t, uint64_t seed, ReplicaRow& row) {
        const Multigraph g = make_connected_graph(n, cfg.d, seed);
        const GreenMatrix green = green_zero_average(g);
        const GoodGraphReport report = good_graph_report(g, green);
        row.values[0] = report.spectral_gap;
        row.values[1] = report.green_diag_error;
        row.values[2] = report.green_offdiag_error;
        row.values[3] = static_cast<double>(report.tree_like_count);
        row.values[4] = static_cast<double>(report.max_cycles_in_log_ball);
        row.values[5] = is_simple(g) ? 1.0 : 0.0;
    });
    for (const int n : cfg.n_grid) {
        res.summary[nkey(n, "spectral_gap_mean")] = mean(column_values(res, 0, n));
        const auto diag = column_values(res, 1, n);
        const auto off = column_values(res, 2, n);
        res.summary[nkey(n, "green_diag_error_max")] = *std::max_element(diag.begin(), diag.end());
        res.summary[nkey(n, "green_offdiag_error_max")] = *std::max_element(off.begin(), off.end());
    }
    res.plots.push_back(column_plot(res, 0, "spectral_gap"));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentResult res;
    res.config = cfg;
    res.hash = config_hash(cfg);
    if (cfg.kind == "giant_fraction") run_giant_fraction(cfg, res);
    else if (cfg.kind == "second_component") run_second_component(cfg, res);
    else if (cfg.kind == "core_kernel") run_core_kernel(cfg, res);
    else if (cfg.kind == "diameter") run_diameter(cfg, res);
    else if (cfg.kind == "typical_distance") run_typical_distance(cfg, res);
    else if (cfg.kind == "local_limit") run_local_limit(cfg, res);
    else if (cfg.kind == "tree_estimates") run_tree_estimates(cfg, res);
    else if (cfg.kind == "green_validation") run_green_validation(cfg, res);
    write_result(res, cfg.out_dir);
    return res;
}

void write_result(const ExperimentResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::ofstream csv(dir + "/replicas.csv");
    if (!csv) throw std::runtime_error("cannot write " + dir + "/replicas.csv");
    csv << "n,replica";
    for (const auto& c : result.columns) csv << "," << c;
    csv << "\n";
    for (const auto& row : result.rows) {
        csv << row.n << "," << row.replica;
        for (const double v : row.values) csv << "," << format_g17(v);
        csv << "\n";
    }

    nlohmann::json j;
    const ExperimentConfig& cfg = result.config;
    j["provenance"]["version"] = kVersion;
    j["provenance"]["kind"] = cfg.kind;
    j["provenance"]["seed"] = cfg.seed;
    j["provenance"]["config_hash"] = hash_hex(result.hash);
    j["provenance"]["canonical_config"] = canonical_config_string(cfg);
    auto& jc = j["provenance"]["config"];
    jc["kind"] = cfg.kind;
    jc["d"] = cfg.d;
    jc["h"] = cfg.h;
    jc["n"] = cfg.n_grid;
    jc["replicas"] = cfg.replicas;
    jc["seed"] = cfg.seed;
    jc["kappa"] = cfg.kappa;
    jc["lambda_hat"] = cfg.lambda_hat;
    jc["K"] = cfg.K;
    jc["tree_replicas"] = cfg.tree_replicas;
    jc["census_radius"] = cfg.census_radius;
    jc["distance_pairs"] = cfg.distance_pairs;
    jc["boundary_floor"] = cfg.boundary_floor;
    j["summary"] = result.summary;
    std::ofstream js(dir + "/summary.json");
    if (!js) throw std::runtime_error("cannot write " + dir + "/summary.json");
    js << j.dump(2) << "\n";

    for (const auto& p : result.plots) {
        std::ofstream pf(dir + "/plotdata_" + p.name + ".csv");
        if (!pf) throw std::runtime_error("cannot write plotdata_" + p.name + ".csv");
        pf << "x,y,yerr\n";
        for (const auto& pt : p.points)
            pf << format_g17(pt[0]) << "," << format_g17(pt[1]) << "," << format_g17(pt[2]) << "\n";
    }

    if (!result.census.empty()) {
        std::ofstream cf(dir + "/census.csv");
        if (!cf) throw std::runtime_error("cannot write census.csv");
        cf << "code,count\n";
        for (const auto& [code, count] : result.census) cf << code << "," << count << "\n";
    }
}

std::vector<ExperimentResult> sweep(const ExperimentConfig& cfg_template, const std::string& name,
                                    const std::vector<std::string>& values) {
    std::vector<ExperimentResult> results;
    if (values.empty()) return results;
    for (const auto& value : values) {
        ExperimentConfig cfg = cfg_template;
        apply_parameter(cfg, name, value);
        std::string tag = value;
        for (char& c : tag)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
        cfg.out_dir = cfg_template.out_dir + "/" + name + "_" + tag;
        results.push_back(run_experiment(cfg));
    }

    std::set<std::string> keys;
    for (const auto& r : results)
        for (const auto& [k, v] : r.summary) keys.insert(k);
    namespace fs = std::filesystem;
    fs::create_directories(cfg_template.out_dir);
    std::ofstream table(cfg_template.out_dir + "/sweep.csv");
    if (!table) throw std::runtime_error("cannot write sweep.csv");
    table << "param,value,config_hash";
    for (const auto& k : keys) table << "," << k;
    table << "\n";
    for (size_t i = 0; i < results.size(); ++i) {
        table << name << "," << values[i] << "," << hash_hex(results[i].hash);
        for (const auto& k : keys) {
            const auto it = results[i].summary.find(k);
            table << ",";
            if (it != results[i].summary.end()) table << format_g17(it->second);
        }
        table << "\n";
    }
    return results;
}

}  // namespace gffperc
