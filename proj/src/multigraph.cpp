#include "gffperc/multigraph.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "gffperc/green.hpp"

namespace gffperc {

namespace {

void validate_n_d(int n, int d) {
    if (n < 1) throw std::invalid_argument("multigraph: n must be positive");
    if (d < 3) throw std::invalid_argument("multigraph: d must be at least 3");
    if ((static_cast<int64_t>(n) * d) % 2 != 0)
        throw std::invalid_argument("multigraph: n*d must be even");
}

// Union-find over 0..n-1 with path halving.
struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    // Returns true if x and y were in different sets.
    bool unite(int x, int y) {
        int rx = find(x), ry = find(y);
        if (rx == ry) return false;
        parent[rx] = ry;
        return true;
    }
};

}  // namespace

Multigraph generate_configuration_model(int n, int d, Rng& rng) {
    validate_n_d(n, d);
    Multigraph g;
    g.n = n;
    g.d = d;
    const int m = n * d;
    g.pairing.assign(m, -1);
    // Partner shuffle: repeatedly match the last free half-edge to a uniform
    // other free one. Induces the uniform perfect matching.
    std::vector<int> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    for (int remaining = m; remaining > 0; remaining -= 2) {
        const int a = pool[remaining - 1];
        const int j = static_cast<int>(rng.next_below(static_cast<uint64_t>(remaining - 1)));
        const int b = pool[j];
        g.pairing[a] = b;
        g.pairing[b] = a;
        pool[j] = pool[remaining - 2];
    }
    return g;
}

Multigraph generate_simple_graph(int n, int d, Rng& rng, int max_attempts) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Multigraph g = generate_configuration_model(n, d, rng);
        if (is_simple(g)) return g;
    }
    throw std::runtime_error("generate_simple_graph: no simple realization within attempt budget");
}

bool is_simple(const Multigraph& g) {
    std::unordered_map<int64_t, int> seen_edges;
    for (int he = 0; he < g.half_edges(); ++he) {
        const int p = g.pairing[he];
        if (p <= he) continue;
        const int u = g.vertex_of(he), v = g.vertex_of(p);
        if (u == v) return false;  // loop
        const int64_t key = static_cast<int64_t>(std::min(u, v)) * g.n + std::max(u, v);
        if (++seen_edges[key] > 1) return false;  // repeated edge
    }
    return true;
}

bool is_connected(const Multigraph& g) {
    if (g.n == 0) return true;
    std::vector<char> visited(g.n, 0);
    std::vector<int> stack = {0};
    visited[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int k = 0; k < g.d; ++k) {
            const int u = g.neighbor(v, k);
            if (!visited[u]) {
                visited[u] = 1;
                ++count;
                stack.push_back(u);
            }
        }
    }
    return count == g.n;
}

std::vector<std::pair<int, int>> edge_list(const Multigraph& g) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(g.half_edges() / 2);
    for (int he = 0; he < g.half_edges(); ++he) {
        const int p = g.pairing[he];
        if (p > he) edges.emplace_back(g.vertex_of(he), g.vertex_of(p));
    }
    return edges;
}

int tree_excess(const Subgraph& s) {
    if (!s.edges.empty() && s.parent_d <= 0)
        throw std::invalid_argument("tree_excess: subgraph missing parent degree");
    // Map vertex ids to dense indices for the union-find.
    std::unordered_map<int, int> index;
    index.reserve(s.vertices.size() * 2);
    for (size_t i = 0; i < s.vertices.size(); ++i) index[s.vertices[i]] = static_cast<int>(i);
    DisjointSets ds(static_cast<int>(s.vertices.size()));
    int components = static_cast<int>(s.vertices.size());
    for (const auto& [a, b] : s.edges) {
        const int u = index.at(s.vertex_of(a));
        const int v = index.at(s.vertex_of(b));
        if (ds.unite(u, v)) --components;
    }
    return static_cast<int>(s.edges.size()) - static_cast<int>(s.vertices.size()) + components;
}

Subgraph ball(const Multigraph& g, const std::vector<int>& centers, int radius) {
    for (int c : centers)
        if (c < 0 || c >= g.n) throw std::invalid_argument("ball: unknown vertex id");
    std::vector<int> dist(g.n, -1);
    std::vector<int> queue;
    queue.reserve(centers.size());
    for (int c : centers) {
        if (dist[c] == -1) {
            dist[c] = 0;
            queue.push_back(c);
        }
    }
    for (size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        if (dist[v] == radius) continue;
        for (int k = 0; k < g.d; ++k) {
            const int u = g.neighbor(v, k);
            if (dist[u] == -1) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    Subgraph s;
    s.parent_d = g.d;
    s.vertices = queue;
    std::sort(s.vertices.begin(), s.vertices.end());
    for (int v : s.vertices) {
        for (int k = 0; k < g.d; ++k) {
            const int he = g.half_edge(v, k);
            const int p = g.pairing[he];
            if (p > he && dist[g.vertex_of(p)] != -1) s.edges.emplace_back(he, p);
        }
    }
    return s;
}

Subgraph ball_directed(const Multigraph& g, int x, int y, int radius) {
    if (x < 0 || x >= g.n || y < 0 || y >= g.n)
        throw std::invalid_argument("ball_directed: unknown vertex id");
    std::vector<int> dist(g.n, -1);
    std::vector<int> queue = {x};
    dist[x] = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        if (dist[v] == radius) continue;
        for (int k = 0; k < g.d; ++k) {
            const int u = g.neighbor(v, k);
            if (v == x && dist[v] == 0 && u == y) continue;  // forbidden first step
            if (dist[u] == -1) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    Subgraph s;
    s.parent_d = g.d;
    s.vertices = queue;
    std::sort(s.vertices.begin(), s.vertices.end());
    for (int v : s.vertices) {
        for (int k = 0; k < g.d; ++k) {
            const int he = g.half_edge(v, k);
            const int p = g.pairing[he];
            if (p > he && dist[g.vertex_of(p)] != -1) s.edges.emplace_back(he, p);
        }
    }
    return s;
}

double spectral_gap(const Multigraph& g, double tol, int max_iter) {
    if (!is_connected(g)) return 0.0;
    if (g.n == 1) return 1.0;  // single vertex with d/2 loops: spectrum {d}
    if (g.n <= 512) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
        for (const auto& [u, v] : edge_list(g)) {
            if (u == v)
                a(u, u) += 2.0;
            else {
                a(u, v) += 1.0;
                a(v, u) += 1.0;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
        const double lambda2 = es.eigenvalues()(g.n - 2);
        return 1.0 - lambda2 / g.d;
    }
    // Power iteration on M = (P+I)/2 (spectrum in [0,1], top eigenvector
    // constant), deflated against constants. For symmetric M the eigenvalue
    // error is bounded by the residual norm, so iterate until the residual
    // certifies the requested tolerance on the gap = 2*(1 - mu_2).
    Rng rng(0x5eedba11u);
    Eigen::VectorXd x(g.n);
    for (int i = 0; i < g.n; ++i) x(i) = rng.next_unit() - 0.5;
    auto deflate = [&](Eigen::VectorXd& v) { v.array() -= v.mean(); };
    auto apply_m = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd out(g.n);
        for (int i = 0; i < g.n; ++i) {
            double acc = 0.0;
            for (int k = 0; k < g.d; ++k) acc += v(g.neighbor(i, k));
            out(i) = 0.5 * (acc / g.d + v(i));
        }
        return out;
    };
    deflate(x);
    x.normalize();
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd mx = apply_m(x);
        deflate(mx);
        const double mu = x.dot(mx);
        const double residual = (mx - mu * x).norm();
        if (2.0 * residual <= tol) return 2.0 * (1.0 - mu);
        const double norm = mx.norm();
        if (norm == 0.0) return 2.0;  // x in the kernel: gap is maximal
        x = mx / norm;
    }
    throw std::runtime_error("spectral_gap: power iteration did not converge");
}

GoodGraphReport good_graph_report(const Multigraph& g, const GreenMatrix& green,
                                  const GoodGraphThresholds& params) {
    GoodGraphReport report;
    report.thresholds_used = params;
    report.spectral_gap = spectral_gap(g, params.spectral_tol);
    const double log_base = std::log(g.d - 1);
    report.cycle_radius =
        std::max(0, static_cast<int>(std::floor(params.cycle_radius_coeff * std::log(g.n) / log_base)));
    report.green_radius = std::max(
        0, static_cast<int>(std::floor(params.green_radius_coeff * std::log(std::log(g.n)) / log_base)));

    const double diag_target = static_cast<double>(g.d - 1) / (g.d - 2);
    const double offdiag_target = 1.0 / (g.d - 2);
    for (int x = 0; x < g.n; ++x) {
        const Subgraph cycle_ball = ball(g, {x}, report.cycle_radius);
        report.max_cycles_in_log_ball = std::max(report.max_cycles_in_log_ball, tree_excess(cycle_ball));
        const Subgraph green_ball = ball(g, {x}, report.green_radius);
        if (tree_excess(green_ball) == 0) {
            ++report.tree_like_count;
            report.green_applicable = true;
            report.green_diag_error =
                std::max(report.green_diag_error, std::abs(green.values(x, x) - diag_target));
            for (int k = 0; k < g.d; ++k) {
                const int y = g.neighbor(x, k);
                if (y == x) continue;
                report.green_offdiag_error =
                    std::max(report.green_offdiag_error, std::abs(green.values(x, y) - offdiag_target));
            }
        }
    }
    return report;
}

void write_edge_list(std::ostream& out, const Multigraph& g) {
    out << g.n << ' ' << g.d << '\n';
    for (const auto& [u, v] : edge_list(g)) out << u << ' ' << v << '\n';
}

Multigraph read_edge_list(std::istream& in) {
    int n = 0, d = 0;
    if (!(in >> n >> d)) throw std::runtime_error("read_edge_list: missing header");
    validate_n_d(n, d);
    Multigraph g;
    g.n = n;
    g.d = d;
    g.pairing.assign(n * d, -1);
    std::vector<int> used(n, 0);
    auto next_slot = [&](int v) {
        if (v < 0 || v >= n) throw std::runtime_error("read_edge_list: vertex id out of range");
        if (used[v] >= d) throw std::runtime_error("read_edge_list: vertex degree exceeds d");
        return v * d + used[v]++;
    };
    int u = 0, v = 0;
    int64_t edges = 0;
    while (in >> u >> v) {
        const int a = next_slot(u);
        const int b = next_slot(v);
        g.pairing[a] = b;
        g.pairing[b] = a;
        ++edges;
    }
    if (edges * 2 != static_cast<int64_t>(n) * d)
        throw std::runtime_error("read_edge_list: edge count does not match n*d/2");
    return g;
}

}  // namespace gffperc
