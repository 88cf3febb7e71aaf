#include "gffperc/tree_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gffperc/gff.hpp"
#include "gffperc/levelset.hpp"
#include "gffperc/stats.hpp"

namespace gffperc {

namespace {

constexpr uint64_t kRootPositionKey = 0x726f6f74u;  // any fixed tag works

uint64_t child_position(uint64_t parent_key, int slot) {
    return mix64(parent_key + kSplitmixGamma * static_cast<uint64_t>(slot + 1));
}

// Shared growth loop; Draw is called as draw(parent_position, slot) for child
// normals and draw(kRootPositionKey, -1) for the root normal.
template <typename Draw>
TreeSample grow_cluster(int d, double h, RootLaw root_law, int max_generation, int64_t max_size,
                        bool one_sided, bool with_positions, Draw&& draw) {
    if (d < 3) throw std::invalid_argument("simulate_cluster: d must be at least 3");
    if (max_generation < 1 || max_size < 1)
        throw std::invalid_argument("simulate_cluster: caps must be at least 1");
    TreeSample s;
    s.d = d;
    s.h = h;
    s.one_sided = one_sided;
    const double phi_root =
        root_law.fixed ? root_law.value : tree_gff_root(d, draw(kRootPositionKey, -1));
    if (phi_root < h) {
        s.generation_sizes = {0};
        s.status = TreeStatus::died;
        s.died_generation = 0;
        return s;
    }
    s.field_values.push_back(phi_root);
    s.parent.push_back(-1);
    s.depth.push_back(0);
    if (with_positions) s.position.push_back(kRootPositionKey);
    s.generation_sizes = {1};
    if (max_size == 1) {
        s.status = TreeStatus::truncated_by_size;
        return s;
    }

    std::vector<int64_t> current = {0};
    for (int k = 0;; ++k) {
        if (k == max_generation) {
            s.status = TreeStatus::truncated_by_generation;
            return s;
        }
        std::vector<int64_t> next;
        for (int64_t idx : current) {
            const int slots = (s.depth[idx] == 0 && !one_sided) ? d : d - 1;
            const uint64_t pos = with_positions ? s.position[idx] : 0;
            for (int slot = 0; slot < slots; ++slot) {
                const double xi = draw(pos, slot);
                const double phi = tree_gff_child(s.field_values[idx], xi, d);
                if (phi < h) continue;
                s.field_values.push_back(phi);
                s.parent.push_back(static_cast<int>(idx));
                s.depth.push_back(k + 1);
                if (with_positions) s.position.push_back(child_position(pos, slot));
                next.push_back(s.size() - 1);
                if (s.size() == max_size) {
                    s.generation_sizes.push_back(static_cast<int64_t>(next.size()));
                    s.status = TreeStatus::truncated_by_size;
                    return s;
                }
            }
        }
        s.generation_sizes.push_back(static_cast<int64_t>(next.size()));
        if (next.empty()) {
            s.status = TreeStatus::died;
            s.died_generation = k + 1;
            return s;
        }
        current = std::move(next);
    }
}

// Frontier-only growth for the estimators: keeps the current generation's
// field values and counters, nothing else. A frontier reaching width_cap is
// declared surviving and growth stops.
struct FastGrowth {
    bool died = false;
    int generations = 0;     // last generation grown (or where death occurred)
    int64_t total_size = 0;  // cluster vertices created
    std::vector<int64_t> gen_sizes;
};

FastGrowth grow_frontier(int d, double h, RootLaw root_law, bool one_sided, int max_generation,
                         int64_t width_cap, int64_t size_cap, bool record_sizes, Rng& rng) {
    FastGrowth out;
    const double phi_root = root_law.fixed ? root_law.value : tree_gff_root(d, rng);
    if (phi_root < h) {
        out.died = true;
        if (record_sizes) out.gen_sizes = {0};
        return out;
    }
    out.total_size = 1;
    if (record_sizes) out.gen_sizes = {1};
    std::vector<double> frontier = {phi_root};
    const double child_scale = tree_child_scale(d);
    for (int k = 0; k < max_generation; ++k) {
        if (static_cast<int64_t>(frontier.size()) >= width_cap || out.total_size >= size_cap) {
            out.generations = k;
            return out;  // declared surviving by cap
        }
        std::vector<double> next;
        next.reserve(frontier.size() * (d - 1));
        for (size_t i = 0; i < frontier.size(); ++i) {
            const int slots = (k == 0 && !one_sided) ? d : d - 1;
            for (int slot = 0; slot < slots; ++slot) {
                const double phi = child_scale * rng.next_normal() + frontier[i] / (d - 1);
                if (phi >= h) next.push_back(phi);
            }
        }
        out.total_size += static_cast<int64_t>(next.size());
        if (record_sizes) out.gen_sizes.push_back(static_cast<int64_t>(next.size()));
        if (next.empty()) {
            out.died = true;
            out.generations = k + 1;
            return out;
        }
        frontier = std::move(next);
    }
    out.generations = max_generation;
    return out;
}

}  // namespace

TreeSample simulate_cluster(int d, double h, RootLaw root_law, int max_generation,
                            int64_t max_size, bool one_sided, Rng& rng) {
    return grow_cluster(d, h, root_law, max_generation, max_size, one_sided, false,
                        [&rng](uint64_t, int) { return rng.next_normal(); });
}

TreeSample simulate_cluster_coupled(int d, double h, RootLaw root_law, int max_generation,
                                    int64_t max_size, bool one_sided,
                                    const GaussianReservoir& reservoir) {
    return grow_cluster(d, h, root_law, max_generation, max_size, one_sided, true,
                        [&reservoir](uint64_t pos, int slot) {
                            return slot < 0 ? reservoir.xi(pos)
                                            : reservoir.xi(child_position(pos, slot));
                        });
}

EtaEstimate estimate_eta(int d, double h, int K, int64_t replicas, Rng& rng, int64_t width_cap) {
    if (K < 1 || replicas < 1) throw std::invalid_argument("estimate_eta: K and replicas >= 1");
    const uint64_t base = rng.next_u64();
    int64_t survived = 0;
    for (int64_t r = 0; r < replicas; ++r) {
        Rng sub(derive_seed(base, "eta", static_cast<uint64_t>(r)));
        const FastGrowth growth = grow_frontier(d, h, RootLaw::prior(), false, K, width_cap,
                                                std::numeric_limits<int64_t>::max(), false, sub);
        if (!growth.died) ++survived;
    }
    EtaEstimate est;
    est.d = d;
    est.h = h;
    est.proxy_generation = K;
    est.replicas = replicas;
    est.point_estimate = static_cast<double>(survived) / static_cast<double>(replicas);
    est.std_error = binomial_std_error(est.point_estimate, static_cast<double>(replicas));
    return est;
}

double estimate_lambda(int d, double h, int K, int64_t replicas, Rng& rng, int64_t max_size) {
    if (K < 2) throw std::invalid_argument("estimate_lambda: K must be at least 2");
    const uint64_t base = rng.next_u64();
    std::vector<double> xs, ys;
    for (int64_t r = 0; r < replicas; ++r) {
        Rng sub(derive_seed(base, "lambda", static_cast<uint64_t>(r)));
        const FastGrowth growth =
            grow_frontier(d, h, RootLaw::prior(), false, K,
                          std::numeric_limits<int64_t>::max(), max_size, true, sub);
        if (growth.died) continue;
        if (static_cast<int>(growth.gen_sizes.size()) <= K) continue;  // size-capped early
        for (int k = K / 2; k <= K; ++k) {
            xs.push_back(static_cast<double>(k));
            ys.push_back(std::log(static_cast<double>(growth.gen_sizes[k])));
        }
    }
    if (xs.empty()) throw std::runtime_error("estimate_lambda: no surviving replicas");
    return std::exp(linear_fit(xs, ys).slope);
}

Interval estimate_h_star(int d, double tol, int K, int64_t replicas, Rng& rng, double lo,
                         double hi) {
    if (tol <= 0.0) throw std::invalid_argument("estimate_h_star: tol must be positive");
    const uint64_t base = rng.next_u64();
    auto supercritical = [&](double h) {
        Rng sub(derive_seed(base, {"hstar", std::to_string(h)}));
        const EtaEstimate est = estimate_eta(d, h, K, replicas, sub);
        return est.point_estimate > 3.0 * est.std_error;
    };
    if (!supercritical(lo) || supercritical(hi))
        throw std::runtime_error("estimate_h_star: bracket does not straddle the transition");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (supercritical(mid) ? lo : hi) = mid;
    }
    return {lo, hi};
}

TailCurve finite_cluster_tail(int d, double h, const std::vector<int64_t>& size_grid,
                              int64_t replicas, Rng& rng, int64_t width_cap) {
    if (replicas < 1) throw std::invalid_argument("finite_cluster_tail: replicas >= 1");
    TailCurve curve;
    curve.size_grid = size_grid;
    curve.replicas = replicas;
    curve.tail.assign(size_grid.size(), 0.0);
    const uint64_t base = rng.next_u64();
    // A cluster whose frontier never reaches width_cap but keeps moving is
    // possible only with vanishing probability; the generation backstop keeps
    // such replicas out of the finite count rather than looping forever.
    const int generation_backstop = 100000;
    std::vector<int64_t> finite_ge(size_grid.size(), 0);
    for (int64_t r = 0; r < replicas; ++r) {
        Rng sub(derive_seed(base, "tail", static_cast<uint64_t>(r)));
        const FastGrowth growth =
            grow_frontier(d, h, RootLaw::prior(), false, generation_backstop, width_cap,
                          std::numeric_limits<int64_t>::max(), false, sub);
        if (!growth.died) continue;
        ++curve.finite_replicas;
        for (size_t i = 0; i < size_grid.size(); ++i)
            if (growth.total_size >= size_grid[i]) ++finite_ge[i];
    }
    for (size_t i = 0; i < size_grid.size(); ++i)
        curve.tail[i] = static_cast<double>(finite_ge[i]) / static_cast<double>(replicas);
    return curve;
}

CoreKernelProbs estimate_core_kernel_probs(int d, double h, int K, int64_t replicas, Rng& rng,
                                           int64_t width_cap) {
    if (K < 1 || replicas < 1)
        throw std::invalid_argument("estimate_core_kernel_probs: K and replicas >= 1");
    const uint64_t base = rng.next_u64();
    int64_t at_least_2 = 0, at_least_3 = 0;
    const double child_scale = tree_child_scale(d);
    for (int64_t r = 0; r < replicas; ++r) {
        Rng sub(derive_seed(base, "corekernel", static_cast<uint64_t>(r)));
        const double phi_root = tree_gff_root(d, sub);
        if (phi_root < h) continue;
        int surviving_children = 0;
        for (int slot = 0; slot < d; ++slot) {
            const double phi_child = child_scale * sub.next_normal() + phi_root / (d - 1);
            if (phi_child < h) continue;
            // The child's subtree is a one-sided cluster rooted at a vertex
            // with a pinned value; offspring at cluster generation K means
            // lineage generation K-1.
            const FastGrowth lineage =
                grow_frontier(d, h, RootLaw::fixed_value(phi_child), true, K - 1, width_cap,
                              std::numeric_limits<int64_t>::max(), false, sub);
            if (!lineage.died) ++surviving_children;
        }
        if (surviving_children >= 2) ++at_least_2;
        if (surviving_children >= 3) ++at_least_3;
    }
    CoreKernelProbs probs;
    probs.replicas = replicas;
    probs.k1 = static_cast<double>(at_least_2) / static_cast<double>(replicas);
    probs.k2 = static_cast<double>(at_least_3) / static_cast<double>(replicas);
    return probs;
}

std::map<std::string, double> conditioned_ball_distribution(int d, double h, int k, int K,
                                                            int64_t replicas, Rng& rng,
                                                            int64_t width_cap) {
    if (k < 0 || k >= K)
        throw std::invalid_argument("conditioned_ball_distribution: need 0 <= k < K");
    const uint64_t base = rng.next_u64();
    const double child_scale = tree_child_scale(d);
    std::map<std::string, int64_t> counts;
    int64_t survivors = 0;
    for (int64_t r = 0; r < replicas; ++r) {
        Rng sub(derive_seed(base, "census", static_cast<uint64_t>(r)));
        // Structured growth to depth k, then frontier-only growth to K with
        // the width-cap survival shortcut.
        const double phi_root = tree_gff_root(d, sub);
        if (phi_root < h) continue;
        std::vector<int> parent = {-1};
        std::vector<int> node_depth = {0};
        std::vector<double> value = {phi_root};
        std::vector<int> current = {0};
        bool died = false;
        for (int depth = 0; depth < k && !died; ++depth) {
            std::vector<int> next;
            for (int idx : current) {
                const int slots = (node_depth[idx] == 0) ? d : d - 1;
                for (int slot = 0; slot < slots; ++slot) {
                    const double phi = child_scale * sub.next_normal() + value[idx] / (d - 1);
                    if (phi < h) continue;
                    parent.push_back(idx);
                    node_depth.push_back(depth + 1);
                    value.push_back(phi);
                    next.push_back(static_cast<int>(value.size()) - 1);
                }
            }
            if (next.empty()) died = true;
            current = std::move(next);
        }
        if (!died) {
            // Continue from the depth-k frontier to generation K.
            std::vector<double> frontier;
            for (int idx : current) frontier.push_back(value[idx]);
            for (int depth = k; depth < K; ++depth) {
                if (static_cast<int64_t>(frontier.size()) >= width_cap) break;
                std::vector<double> next;
                for (double v : frontier) {
                    for (int slot = 0; slot < d - 1; ++slot) {
                        const double phi = child_scale * sub.next_normal() + v / (d - 1);
                        if (phi >= h) next.push_back(phi);
                    }
                }
                if (next.empty()) {
                    died = true;
                    break;
                }
                frontier = std::move(next);
            }
        }
        if (died) continue;
        ++survivors;
        RootedTree tree;
        tree.root = 0;
        tree.children.assign(value.size(), {});
        for (size_t i = 1; i < parent.size(); ++i)
            tree.children[parent[i]].push_back(static_cast<int>(i));
        ++counts[canonical_tree_code(tree)];
    }
    if (survivors == 0)
        throw std::runtime_error("conditioned_ball_distribution: no surviving replicas");
    std::map<std::string, double> distribution;
    for (const auto& [code, count] : counts)
        distribution[code] = static_cast<double>(count) / static_cast<double>(survivors);
    return distribution;
}

}  // namespace gffperc
