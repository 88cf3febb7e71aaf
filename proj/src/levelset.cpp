#include "gffperc/levelset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace gffperc {

namespace {

// Induced subgraph on a vertex subset, re-indexed to 0..m-1 with a CSR
// adjacency (multiplicities kept; loops appear twice). Shared scratch for the
// BFS-heavy operations.
struct LocalGraph {
    std::vector<int> vertices;        // local -> parent id, sorted
    std::vector<int> offsets;         // CSR
    std::vector<int> targets;

    int size() const { return static_cast<int>(vertices.size()); }
};

LocalGraph make_local(const Multigraph& g, const std::vector<int>& subset) {
    LocalGraph local;
    local.vertices = subset;
    std::sort(local.vertices.begin(), local.vertices.end());
    local.vertices.erase(std::unique(local.vertices.begin(), local.vertices.end()),
                         local.vertices.end());
    std::unordered_map<int, int> index;
    index.reserve(local.vertices.size() * 2);
    for (size_t i = 0; i < local.vertices.size(); ++i) {
        const int v = local.vertices[i];
        if (v < 0 || v >= g.n) throw std::invalid_argument("subset vertex out of range");
        index[v] = static_cast<int>(i);
    }
    local.offsets.assign(local.vertices.size() + 1, 0);
    for (size_t i = 0; i < local.vertices.size(); ++i) {
        const int v = local.vertices[i];
        for (int k = 0; k < g.d; ++k)
            if (index.count(g.neighbor(v, k))) ++local.offsets[i + 1];
    }
    for (size_t i = 1; i < local.offsets.size(); ++i) local.offsets[i] += local.offsets[i - 1];
    local.targets.resize(local.offsets.back());
    std::vector<int> cursor(local.offsets.begin(), local.offsets.end() - 1);
    for (size_t i = 0; i < local.vertices.size(); ++i) {
        const int v = local.vertices[i];
        for (int k = 0; k < g.d; ++k) {
            auto it = index.find(g.neighbor(v, k));
            if (it != index.end()) local.targets[cursor[i]++] = it->second;
        }
    }
    return local;
}

// BFS over the local graph; returns (distances, farthest vertex). A stop
// target < 0 means full sweep.
std::pair<std::vector<int>, int> local_bfs(const LocalGraph& local, int source, int stop = -1) {
    std::vector<int> dist(local.size(), -1);
    std::vector<int> queue;
    queue.reserve(local.size());
    dist[source] = 0;
    queue.push_back(source);
    int farthest = source;
    for (size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        if (v == stop) break;
        for (int e = local.offsets[v]; e < local.offsets[v + 1]; ++e) {
            const int u = local.targets[e];
            if (dist[u] == -1) {
                dist[u] = dist[v] + 1;
                if (dist[u] > dist[farthest]) farthest = u;
                queue.push_back(u);
            }
        }
    }
    return {std::move(dist), farthest};
}

int eccentricity(const LocalGraph& local, int source) {
    auto [dist, farthest] = local_bfs(local, source);
    return dist[farthest];
}

}  // namespace

std::vector<int> level_set(const Field& f, double h) { return f.level_set(h); }

ComponentDecomposition components(const Multigraph& g, const std::vector<int>& s, double level) {
    ComponentDecomposition decomposition;
    decomposition.level = level;
    if (s.empty()) return decomposition;
    const LocalGraph local = make_local(g, s);
    std::vector<int> label(local.size(), -1);
    for (int start = 0; start < local.size(); ++start) {
        if (label[start] != -1) continue;
        std::vector<int> queue = {start};
        label[start] = start;
        std::vector<int> comp = {local.vertices[start]};
        for (size_t head = 0; head < queue.size(); ++head) {
            const int v = queue[head];
            for (int e = local.offsets[v]; e < local.offsets[v + 1]; ++e) {
                const int u = local.targets[e];
                if (label[u] == -1) {
                    label[u] = start;
                    queue.push_back(u);
                    comp.push_back(local.vertices[u]);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        decomposition.components.push_back(std::move(comp));
    }
    std::sort(decomposition.components.begin(), decomposition.components.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  if (a.size() != b.size()) return a.size() > b.size();
                  return a.front() < b.front();
              });
    for (const auto& comp : decomposition.components)
        decomposition.sizes.push_back(static_cast<int64_t>(comp.size()));
    return decomposition;
}

Subgraph two_core(const Multigraph& g, const std::vector<int>& component) {
    std::vector<char> in_comp(g.n, 0);
    for (int v : component) {
        if (v < 0 || v >= g.n) throw std::invalid_argument("two_core: vertex out of range");
        in_comp[v] = 1;
    }
    // Degree inside the induced subgraph; a loop contributes both of its
    // half-edges to its vertex.
    std::unordered_map<int, int> degree;
    degree.reserve(component.size() * 2);
    for (int v : component) {
        int deg = 0;
        for (int k = 0; k < g.d; ++k)
            if (in_comp[g.neighbor(v, k)]) ++deg;
        degree[v] = deg;
    }
    std::vector<int> peel;
    std::unordered_map<int, char> alive;
    alive.reserve(component.size() * 2);
    for (int v : component) alive[v] = 1;
    for (int v : component)
        if (degree[v] <= 1) peel.push_back(v);
    for (size_t head = 0; head < peel.size(); ++head) {
        const int v = peel[head];
        if (!alive[v]) continue;
        alive[v] = 0;
        for (int k = 0; k < g.d; ++k) {
            const int u = g.neighbor(v, k);
            if (u == v || !in_comp[u] || !alive[u]) continue;
            if (--degree[u] == 1) peel.push_back(u);
        }
    }
    Subgraph core;
    core.parent_d = g.d;
    for (int v : component)
        if (alive[v]) core.vertices.push_back(v);
    std::sort(core.vertices.begin(), core.vertices.end());
    for (int v : core.vertices) {
        for (int k = 0; k < g.d; ++k) {
            const int he = g.half_edge(v, k);
            const int p = g.pairing[he];
            const int u = g.vertex_of(p);
            if (p > he && in_comp[u] && alive[u]) core.edges.emplace_back(he, p);
        }
    }
    return core;
}

KernelSummary kernel(const Subgraph& core) {
    KernelSummary summary;
    if (core.vertices.empty()) return summary;
    if (core.parent_d <= 0) throw std::invalid_argument("kernel: subgraph missing parent degree");

    std::unordered_map<int, std::vector<int>> incident;  // vertex -> half-edges
    std::unordered_map<int, int> partner;
    incident.reserve(core.vertices.size() * 2);
    partner.reserve(core.edges.size() * 4);
    for (const auto& [a, b] : core.edges) {
        incident[core.vertex_of(a)].push_back(a);
        incident[core.vertex_of(b)].push_back(b);
        partner[a] = b;
        partner[b] = a;
    }
    for (int v : core.vertices) {
        const auto it = incident.find(v);
        const int deg = (it == incident.end()) ? 0 : static_cast<int>(it->second.size());
        if (deg < 2) throw std::invalid_argument("kernel: input is not a 2-core");
        if (deg >= 3) summary.vertices.push_back(v);
    }
    std::sort(summary.vertices.begin(), summary.vertices.end());
    if (summary.vertices.empty()) {
        summary.cycle_only = true;
        return summary;
    }

    // Walk each chain of degree-2 vertices from a kernel endpoint until the
    // next kernel vertex; a chain is consumed exactly once because every
    // half-edge on it is marked visited.
    std::unordered_set<int> visited;
    visited.reserve(partner.size() * 2);
    for (int u : summary.vertices) {
        for (int he : incident[u]) {
            if (visited.count(he)) continue;
            visited.insert(he);
            int p = partner[he];
            visited.insert(p);
            int w = core.vertex_of(p);
            while (static_cast<int>(incident[w].size()) == 2) {
                const auto& inc = incident[w];
                const int out = (inc[0] == p) ? inc[1] : inc[0];
                visited.insert(out);
                p = partner[out];
                visited.insert(p);
                w = core.vertex_of(p);
            }
            summary.edges.emplace_back(std::min(u, w), std::max(u, w));
        }
    }
    std::sort(summary.edges.begin(), summary.edges.end());
    return summary;
}

int diameter(const Multigraph& g, const std::vector<int>& component) {
    const LocalGraph local = make_local(g, component);
    if (local.size() == 0) throw std::invalid_argument("diameter: empty component");
    auto [dist0, a] = local_bfs(local, 0);
    for (int dv : dist0)
        if (dv == -1) throw std::invalid_argument("diameter: component is not connected");
    if (local.size() == 1) return 0;

    if (local.size() <= 100000) {
        int best = 0;
        for (int v = 0; v < local.size(); ++v) best = std::max(best, eccentricity(local, v));
        return best;
    }

    // Double sweep to get a lower bound and a central root, then iFUB:
    // process vertices by decreasing BFS level; stop when the bound certifies
    // that no deeper level can improve it.
    auto [dist_a, b] = local_bfs(local, a);
    int lower = dist_a[b];
    // Midpoint of an a-b geodesic via parent chase from b.
    int root = b;
    {
        int v = b;
        int steps = dist_a[b] / 2;
        while (steps > 0) {
            for (int e = local.offsets[v]; e < local.offsets[v + 1]; ++e) {
                const int u = local.targets[e];
                if (dist_a[u] == dist_a[v] - 1) {
                    v = u;
                    break;
                }
            }
            --steps;
        }
        root = v;
    }
    auto [levels, deepest] = local_bfs(local, root);
    const int max_level = levels[deepest];
    lower = std::max(lower, max_level);
    std::vector<std::vector<int>> fringe(max_level + 1);
    for (int v = 0; v < local.size(); ++v) fringe[levels[v]].push_back(v);
    for (int level = max_level; level >= 1; --level) {
        if (lower >= 2 * level) break;  // nothing at depth <= level can beat the bound
        for (int v : fringe[level]) lower = std::max(lower, eccentricity(local, v));
    }
    return lower;
}

std::vector<int> sample_typical_distances(const Multigraph& g, const std::vector<int>& component,
                                          int pairs, Rng& rng) {
    const LocalGraph local = make_local(g, component);
    if (local.size() < 2)
        throw std::invalid_argument("sample_typical_distances: need at least two vertices");
    std::vector<int> sample;
    sample.reserve(pairs);
    for (int i = 0; i < pairs; ++i) {
        int x = static_cast<int>(rng.next_below(local.size()));
        int y = static_cast<int>(rng.next_below(local.size()));
        while (y == x) y = static_cast<int>(rng.next_below(local.size()));
        auto [dist, farthest] = local_bfs(local, x, y);
        (void)farthest;
        if (dist[y] < 0)
            throw std::invalid_argument("sample_typical_distances: component is not connected");
        sample.push_back(dist[y]);
    }
    return sample;
}

std::string canonical_tree_code(const RootedTree& t) {
    const int n = static_cast<int>(t.children.size());
    if (t.root < 0 || t.root >= n) throw std::invalid_argument("canonical_tree_code: bad root");
    std::vector<char> visited(n, 0);
    // Post-order with explicit stack; children codes sorted lexicographically.
    std::vector<std::string> code(n);
    struct Frame {
        int node;
        size_t next_child;
    };
    std::vector<Frame> stack = {{t.root, 0}};
    visited[t.root] = 1;
    while (!stack.empty()) {
        Frame& top = stack.back();
        const auto& kids = t.children[top.node];
        if (top.next_child < kids.size()) {
            const int child = kids[top.next_child++];
            if (child < 0 || child >= n || visited[child])
                throw std::invalid_argument("canonical_tree_code: input is not a rooted tree");
            visited[child] = 1;
            stack.push_back({child, 0});
        } else {
            std::vector<std::string> parts;
            parts.reserve(kids.size());
            for (int child : kids) parts.push_back(std::move(code[child]));
            std::sort(parts.begin(), parts.end());
            std::string assembled = "(";
            for (const auto& part : parts) assembled += part;
            assembled += ")";
            code[top.node] = std::move(assembled);
            stack.pop_back();
        }
    }
    return code[t.root];
}

std::map<std::string, int64_t> ball_census(const Multigraph& g, const std::vector<int>& component,
                                           int k) {
    const LocalGraph local = make_local(g, component);
    std::map<std::string, int64_t> census;
    std::vector<int> depth(local.size(), -1);
    for (int x = 0; x < local.size(); ++x) {
        // Depth-bounded BFS inside the component.
        std::vector<int> ball_nodes = {x};
        depth[x] = 0;
        for (size_t head = 0; head < ball_nodes.size(); ++head) {
            const int v = ball_nodes[head];
            if (depth[v] == k) continue;
            for (int e = local.offsets[v]; e < local.offsets[v + 1]; ++e) {
                const int u = local.targets[e];
                if (depth[u] == -1) {
                    depth[u] = depth[v] + 1;
                    ball_nodes.push_back(u);
                }
            }
        }
        // Count induced edges among the ball's vertices (multiplicities and
        // loops included): a connected ball is a tree iff e = v - 1.
        int64_t edge_endpoints = 0;  // each induced non-loop edge counted twice, loops twice
        for (int v : ball_nodes) {
            for (int e = local.offsets[v]; e < local.offsets[v + 1]; ++e)
                if (depth[local.targets[e]] != -1) ++edge_endpoints;
        }
        const int64_t edges = edge_endpoints / 2;
        if (edges != static_cast<int64_t>(ball_nodes.size()) - 1) {
            ++census[kNonTreeBallKey];
        } else {
            RootedTree tree;
            tree.root = 0;
            tree.children.assign(ball_nodes.size(), {});
            std::unordered_map<int, int> tree_index;
            tree_index.reserve(ball_nodes.size() * 2);
            for (size_t i = 0; i < ball_nodes.size(); ++i)
                tree_index[ball_nodes[i]] = static_cast<int>(i);
            for (int v : ball_nodes) {
                for (int e = local.offsets[v]; e < local.offsets[v + 1]; ++e) {
                    const int u = local.targets[e];
                    if (depth[u] == depth[v] + 1)
                        tree.children[tree_index[v]].push_back(tree_index[u]);
                }
            }
            ++census[canonical_tree_code(tree)];
        }
        for (int v : ball_nodes) depth[v] = -1;  // reset scratch
    }
    return census;
}

}  // namespace gffperc
