#pragma once
// The level-set cluster of the root on the d-regular tree (and its one-sided
// variant): simulation with caps, and the estimators built on it — survival
// probability, generation growth rate, critical level, finite-cluster tails,
// the 2-plus/3-plus surviving-children probabilities, and the conditioned
// distribution of the cluster's rooted ball.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gffperc/rng.hpp"

namespace gffperc {

enum class TreeStatus { died, truncated_by_generation, truncated_by_size };

struct TreeSample {
    int d = 0;
    double h = 0.0;
    bool one_sided = false;
    std::vector<int64_t> generation_sizes;  // |Z_k|, k = 0..last recorded
    TreeStatus status = TreeStatus::died;
    int died_generation = -1;  // first empty generation when status == died

    // Cluster structure in BFS order (root first).
    std::vector<double> field_values;
    std::vector<int> parent;  // index into the arrays; -1 for the root
    std::vector<int> depth;
    // Tree-position keys, filled only by the coupled variant; equal keys across
    // two runs identify the same tree position.
    std::vector<uint64_t> position;

    int64_t size() const { return static_cast<int64_t>(field_values.size()); }
    bool survived() const { return status != TreeStatus::died; }
};

struct RootLaw {
    bool fixed = false;
    double value = 0.0;

    static RootLaw prior() { return {}; }
    static RootLaw fixed_value(double a) { return {true, a}; }
};

// Breadth-first growth of the cluster {z : field >= h on the whole root
// path}. Root: included iff its draw (or the fixed value) is >= h; a
// two-sided root spawns d child slots, every other vertex d-1. Truncates when
// the generation cap is reached with a nonempty generation, or when the
// cluster size reaches max_size.
TreeSample simulate_cluster(int d, double h, RootLaw root_law, int max_generation,
                            int64_t max_size, bool one_sided, Rng& rng);

// Same growth, but each tree position draws its normal from the reservoir at
// a position-derived key, so two clusters at different levels (or the same
// cluster re-run) consume identical normals at identical positions. This is
// the construction behind the monotone-coupling checks.
TreeSample simulate_cluster_coupled(int d, double h, RootLaw root_law, int max_generation,
                                    int64_t max_size, bool one_sided,
                                    const GaussianReservoir& reservoir);

struct EtaEstimate {
    int d = 0;
    double h = 0.0;
    int proxy_generation = 0;
    int64_t replicas = 0;
    double point_estimate = 0.0;
    double std_error = 0.0;
};

// Survival probability via the proxy P(generation K nonempty). A frontier
// that reaches width_cap is declared surviving: the chance that that many
// independent supercritical lines all die is far below Monte Carlo
// resolution, and the shortcut makes the estimator near-linear.
EtaEstimate estimate_eta(int d, double h, int K, int64_t replicas, Rng& rng,
                         int64_t width_cap = 512);

// Exponential growth rate of surviving generations: pooled least-squares
// slope of log |Z_k| over k in [K/2, K] across replicas that reach generation
// K, exponentiated. Throws if no replica survives.
double estimate_lambda(int d, double h, int K, int64_t replicas, Rng& rng,
                       int64_t max_size = 1000000);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Bisection on h of the predicate "eta estimate exceeds 3 standard errors",
// over the bracket [lo, hi]; returns an interval of width <= tol. Throws if
// the bracket does not straddle the transition.
Interval estimate_h_star(int d, double tol, int K, int64_t replicas, Rng& rng, double lo = 0.0,
                         double hi = 4.0);

struct TailCurve {
    std::vector<int64_t> size_grid;
    std::vector<double> tail;  // P(|C| >= k and C finite) per grid entry
    int64_t replicas = 0;
    int64_t finite_replicas = 0;
};

// Empirical joint tail of cluster size and finiteness, from fully resolved
// replicas (a frontier reaching width_cap counts as infinite).
TailCurve finite_cluster_tail(int d, double h, const std::vector<int64_t>& size_grid,
                              int64_t replicas, Rng& rng, int64_t width_cap = 512);

struct CoreKernelProbs {
    double k1 = 0.0;  // P(>= 2 root children with offspring at generation K)
    double k2 = 0.0;  // P(>= 3 such children)
    int64_t replicas = 0;
};

CoreKernelProbs estimate_core_kernel_probs(int d, double h, int K, int64_t replicas, Rng& rng,
                                           int64_t width_cap = 512);

// Distribution of the canonical code of the cluster's radius-k ball among
// replicas whose cluster reaches generation K. Requires k < K; throws if no
// replica survives.
std::map<std::string, double> conditioned_ball_distribution(int d, double h, int k, int K,
                                                            int64_t replicas, Rng& rng,
                                                            int64_t width_cap = 512);

}  // namespace gffperc
