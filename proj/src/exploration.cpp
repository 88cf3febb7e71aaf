#include "gffperc/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

#include "gffperc/gff.hpp"
#include "gffperc/stats.hpp"

namespace gffperc {

namespace {

void validate_lazy_dims(int n, int d) {
    if (n < 1) throw std::invalid_argument("LazyGraphState: n must be >= 1");
    if (d < 1) throw std::invalid_argument("LazyGraphState: d must be >= 1");
    if ((static_cast<int64_t>(n) * d) % 2 != 0)
        throw std::invalid_argument("LazyGraphState: n*d must be even");
}

}  // namespace

LazyGraphState::LazyGraphState(int n, int d) : n_(n), d_(d) {
    validate_lazy_dims(n, d);
    pairing_.assign(static_cast<size_t>(n) * d, -1);
    unpaired_ = static_cast<int64_t>(n) * d;
}

bool LazyGraphState::vertex_touched(int v) const {
    for (int k = 0; k < d_; ++k)
        if (pairing_[static_cast<size_t>(v) * d_ + k] >= 0) return true;
    return false;
}

int LazyGraphState::reveal(int half_edge, Rng& rng) {
    if (half_edge < 0 || half_edge >= static_cast<int>(pairing_.size()))
        throw std::out_of_range("LazyGraphState::reveal: half-edge out of range");
    if (pairing_[half_edge] >= 0)
        throw std::logic_error("LazyGraphState::reveal: half-edge already paired");
    if (unpaired_ < 2)
        throw std::runtime_error("LazyGraphState::reveal: exhausted half-edges, no free partner");
    const uint64_t total = pairing_.size();
    for (;;) {
        const int cand = static_cast<int>(rng.next_below(total));
        if (cand == half_edge || pairing_[cand] >= 0) continue;
        pairing_[half_edge] = cand;
        pairing_[cand] = half_edge;
        touched_.push_back(half_edge);
        touched_.push_back(cand);
        unpaired_ -= 2;
        ++revealed_;
        return cand;
    }
}

Multigraph LazyGraphState::complete(Rng& rng) const {
    Multigraph g;
    g.n = n_;
    g.d = d_;
    g.pairing = pairing_;
    std::vector<int> pool;
    pool.reserve(static_cast<size_t>(unpaired_));
    for (int he = 0; he < static_cast<int>(g.pairing.size()); ++he)
        if (g.pairing[he] < 0) pool.push_back(he);
    size_t remaining = pool.size();
    while (remaining >= 2) {
        const int a = pool[remaining - 1];
        const uint64_t j = rng.next_below(remaining - 1);
        const int b = pool[j];
        g.pairing[a] = b;
        g.pairing[b] = a;
        pool[j] = pool[remaining - 2];
        remaining -= 2;
    }
    return g;
}

void LazyGraphState::reset() {
    for (int he : touched_) pairing_[he] = -1;
    touched_.clear();
    unpaired_ = static_cast<int64_t>(n_) * d_;
    revealed_ = 0;
}

DerivedExplorationParams derive_exploration_params(const ExplorationParams& params, int n, int d) {
    if (n < 2) throw std::invalid_argument("derive_exploration_params: n must be >= 2");
    if (d < 3) throw std::invalid_argument("derive_exploration_params: d must be >= 3");
    if (params.kappa < 0.0) throw std::invalid_argument("derive_exploration_params: kappa must be >= 0");
    if (params.lambda_hat <= 1.0)
        throw std::invalid_argument("derive_exploration_params: lambda_hat must exceed 1");
    if (params.boundary_floor < 1)
        throw std::invalid_argument("derive_exploration_params: boundary_floor must be >= 1");
    DerivedExplorationParams derived;
    const double log_n = std::log(static_cast<double>(n));
    const double log_deg = std::log(static_cast<double>(d - 1));
    const double raw_a = params.kappa * std::log(log_n) / log_deg;
    derived.a_n = std::max(0, static_cast<int>(std::floor(raw_a)));
    derived.b_n = std::pow(static_cast<double>(d - 1), -derived.a_n) * std::pow(log_n, -6.0);
    const double raw_target = std::ceil(std::sqrt(static_cast<double>(n)) * derived.b_n);
    derived.boundary_target =
        std::max<int64_t>(static_cast<int64_t>(raw_target), params.boundary_floor);
    derived.generation_cap =
        std::max(1, static_cast<int>(std::ceil(log_n / std::log(params.lambda_hat))));
    derived.level_shift = 1.0 / log_n;
    return derived;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::successful: return "successful";
        case Verdict::aborted: return "aborted";
        case Verdict::cycle_stopped: return "cycle_stopped";
        case Verdict::cap_stopped: return "cap_stopped";
        case Verdict::root_rejected: return "root_rejected";
    }
    return "unknown";
}

namespace {

struct BallReveal {
    std::vector<int> reached;  // vertices at depth <= radius, roots included
    bool cycle = false;
};

// Reveal all free half-edges of vertices within depth < radius of the roots,
// walking outward breadth-first over revealed pairings. A reveal whose
// partner vertex is already in `seen` sets the cycle flag and stops. Newly
// reached vertices are added to `seen`. Roots must already be in `seen`.
BallReveal reveal_ball(LazyGraphState& state, const std::vector<int>& roots, int radius,
                       std::unordered_set<int>& seen, Rng& rng) {
    BallReveal out;
    const int d = state.d();
    std::vector<std::pair<int, int>> order;  // (vertex, depth), BFS
    order.reserve(roots.size());
    for (int v : roots) {
        order.emplace_back(v, 0);
        out.reached.push_back(v);
    }
    for (size_t qi = 0; qi < order.size(); ++qi) {
        const auto [v, depth] = order[qi];
        if (depth >= radius) continue;
        for (int k = 0; k < d; ++k) {
            const int he = v * d + k;
            int p = state.partner(he);
            if (p < 0) {
                p = state.reveal(he, rng);
                const int u = p / d;
                if (seen.count(u)) {
                    out.cycle = true;
                    return out;
                }
                seen.insert(u);
                out.reached.push_back(u);
                order.emplace_back(u, depth + 1);
            } else {
                const int u = p / d;
                if (!seen.count(u)) {
                    seen.insert(u);
                    out.reached.push_back(u);
                    order.emplace_back(u, depth + 1);
                }
            }
        }
    }
    return out;
}

}  // namespace

std::pair<Subgraph, bool> reveal_envelope(LazyGraphState& state, const std::vector<int>& frontier,
                                          int radius, Rng& rng) {
    const int n = state.n();
    const int d = state.d();
    for (int v : frontier)
        if (v < 0 || v >= n) throw std::out_of_range("reveal_envelope: frontier vertex out of range");
    if (radius < 0) throw std::invalid_argument("reveal_envelope: radius must be >= 0");
    if (radius > 0 && state.unpaired_count() == 0)
        throw std::runtime_error("reveal_envelope: exhausted half-edges, state fully paired");

    // Seen = the frontier plus every vertex already incident to a revealed
    // pairing; a reveal landing on any of these closes a cycle or re-touches
    // explored territory.
    std::unordered_set<int> seen;
    for (int v = 0; v < n; ++v)
        if (state.vertex_touched(v)) seen.insert(v);
    for (int v : frontier) seen.insert(v);

    BallReveal ball;
    if (radius > 0) {
        ball = reveal_ball(state, frontier, radius, seen, rng);
    } else {
        ball.reached = frontier;
    }

    Subgraph sub;
    sub.parent_d = d;
    sub.vertices = ball.reached;
    std::sort(sub.vertices.begin(), sub.vertices.end());
    sub.vertices.erase(std::unique(sub.vertices.begin(), sub.vertices.end()), sub.vertices.end());
    std::unordered_set<int> in_ball(sub.vertices.begin(), sub.vertices.end());
    for (int v : sub.vertices) {
        for (int k = 0; k < d; ++k) {
            const int he = v * d + k;
            const int p = state.partner(he);
            if (p > he && in_ball.count(p / d)) sub.edges.emplace_back(he, p);
        }
    }
    return {std::move(sub), ball.cycle};
}

ExplorationOutcome explore_component(LazyGraphState& state, int x, double h,
                                     const ExplorationParams& params, ExploreMode mode,
                                     Rng& pair_rng, const GaussianReservoir& reservoir,
                                     uint64_t xi_base) {
    const int n = state.n();
    const int d = state.d();
    if (x < 0 || x >= n) throw std::out_of_range("explore_component: start vertex out of range");
    if (state.vertex_touched(x))
        throw std::invalid_argument("explore_component: start vertex already touched");
    const DerivedExplorationParams derived = derive_exploration_params(params, n, d);
    const double shifted =
        h + (mode == ExploreMode::upper ? derived.level_shift : -derived.level_shift);

    ExplorationOutcome out;
    std::unordered_set<int> seen;
    seen.insert(x);
    uint64_t cursor = xi_base;

    // Root stage: field draw first (fixed reservoir slot), then the
    // tree-likeness check on the radius-a_n root ball. In upper mode both
    // step-0 failures reject the root; in lower mode a failed draw is an
    // empty cluster (died at generation 0) and a root-ball cycle is a
    // cycle stop, so the aborted verdict keeps its died-out meaning.
    const double phi_root = tree_gff_root(d, reservoir.xi(cursor));
    const uint64_t root_slot = cursor++;
    out.probe_order.push_back(x);
    bool root_cycle = false;
    if (phi_root >= shifted && derived.a_n > 0)
        root_cycle = reveal_ball(state, {x}, derived.a_n, seen, pair_rng).cycle;
    if (phi_root < shifted || root_cycle) {
        if (mode == ExploreMode::upper)
            out.verdict = Verdict::root_rejected;
        else
            out.verdict = phi_root < shifted ? Verdict::aborted : Verdict::cycle_stopped;
        out.seen_count = static_cast<int64_t>(seen.size());
        return out;
    }

    out.tree_vertices.push_back(x);
    out.tree_parent.push_back(-1);
    out.tree_depth.push_back(0);
    out.tree_field.push_back(phi_root);
    out.tree_xi_index.push_back(root_slot);

    std::vector<int> frontier = {0};  // indices into the tree arrays
    int generation = 0;
    out.boundary_size = 1;

    for (;;) {
        // Children stage: each frontier vertex contributes its non-parent
        // neighbors as candidates, pairing any half-edges the security
        // envelope has not already revealed. Absent cycles the revealed
        // region is a tree, so every candidate appears exactly once.
        bool cycle = false;
        std::vector<int> next_frontier;
        for (size_t fi = 0; fi < frontier.size() && !cycle; ++fi) {
            const int ti = frontier[fi];
            const int v = out.tree_vertices[ti];
            const int parent_vertex =
                out.tree_parent[ti] >= 0 ? out.tree_vertices[out.tree_parent[ti]] : -1;
            bool parent_skipped = false;
            for (int k = 0; k < d; ++k) {
                const int he = v * d + k;
                int p = state.partner(he);
                int u;
                if (p >= 0) {
                    u = p / d;
                    if (!parent_skipped && u == parent_vertex) {
                        parent_skipped = true;
                        continue;
                    }
                } else {
                    p = state.reveal(he, pair_rng);
                    u = p / d;
                    if (seen.count(u)) {
                        cycle = true;
                        break;
                    }
                    seen.insert(u);
                }
                const double xi = reservoir.xi(cursor);
                const double phi = tree_gff_child(out.tree_field[ti], xi, d);
                out.probe_order.push_back(u);
                if (phi >= shifted) {
                    out.tree_vertices.push_back(u);
                    out.tree_parent.push_back(ti);
                    out.tree_depth.push_back(out.tree_depth[ti] + 1);
                    out.tree_field.push_back(phi);
                    out.tree_xi_index.push_back(cursor);
                    next_frontier.push_back(static_cast<int>(out.tree_vertices.size()) - 1);
                }
                ++cursor;
            }
        }

        if (cycle) {
            out.verdict = Verdict::cycle_stopped;
            break;
        }
        ++generation;
        const int64_t gsize = static_cast<int64_t>(next_frontier.size());
        if (gsize >= derived.boundary_target) {
            out.verdict = Verdict::successful;
            out.generations = generation;
            out.boundary_size = gsize;
            break;
        }
        if (gsize == 0) {
            out.verdict = Verdict::aborted;
            out.generations = generation;
            out.boundary_size = 0;
            break;
        }
        if (generation >= derived.generation_cap) {
            out.verdict = Verdict::cap_stopped;
            out.generations = generation;
            out.boundary_size = gsize;
            break;
        }

        // Security envelope around the admitted generation; a cycle inside it
        // ends the run before the next children stage begins.
        if (derived.a_n > 0) {
            std::vector<int> gen_vertices;
            gen_vertices.reserve(next_frontier.size());
            for (int ti : next_frontier) gen_vertices.push_back(out.tree_vertices[ti]);
            if (reveal_ball(state, gen_vertices, derived.a_n, seen, pair_rng).cycle) {
                out.verdict = Verdict::cycle_stopped;
                out.generations = generation;
                out.boundary_size = gsize;
                break;
            }
        }
        out.generations = generation;
        out.boundary_size = gsize;
        frontier = std::move(next_frontier);
    }

    out.tree_size = static_cast<int64_t>(out.tree_vertices.size());
    out.seen_count = static_cast<int64_t>(seen.size());
    return out;
}

GiantFractionEstimate estimate_giant_fraction(int n, int d, double h,
                                              const ExplorationParams& params, int64_t replicas,
                                              Rng& rng) {
    if (replicas < 1) throw std::invalid_argument("estimate_giant_fraction: replicas must be >= 1");
    const uint64_t base = rng.next_u64();
    LazyGraphState state(n, d);
    GiantFractionEstimate est;
    est.replicas = replicas;
    for (int64_t r = 0; r < replicas; ++r) {
        const uint64_t rep = derive_seed(base, "giant", static_cast<uint64_t>(r));
        Rng pair_rng(derive_seed(rep, {"pairing"}));
        GaussianReservoir reservoir(derive_seed(rep, {"field"}));
        state.reset();
        const int x = static_cast<int>(pair_rng.next_below(static_cast<uint64_t>(n)));
        const ExplorationOutcome outcome =
            explore_component(state, x, h, params, ExploreMode::upper, pair_rng, reservoir);
        est.counts[static_cast<int>(outcome.verdict)] += 1;
    }
    const double p =
        static_cast<double>(est.counts[static_cast<int>(Verdict::successful)]) / replicas;
    est.estimate = p;
    est.std_error = binomial_std_error(p, replicas);
    return est;
}

}  // namespace gffperc
