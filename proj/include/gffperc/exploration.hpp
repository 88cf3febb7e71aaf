#pragma once
// Annealed exploration: grow the level-set cluster of a start vertex while
// revealing the uniform half-edge matching lazily, assigning each candidate
// vertex the tree-recursion field value. Detects giant-component membership
// at sizes far beyond what exact Green-matrix sampling can reach.

#include <cstdint>
#include <utility>
#include <vector>

#include "gffperc/multigraph.hpp"
#include "gffperc/rng.hpp"

namespace gffperc {

// Partially revealed uniform matching on n*d half-edges. Un-revealed
// half-edges stay exchangeable: revealing the partner of a given half-edge
// uniformly among the remaining free ones, in any order, induces the same
// distribution as generating the full matching eagerly.
class LazyGraphState {
  public:
    LazyGraphState(int n, int d);

    int n() const { return n_; }
    int d() const { return d_; }
    bool is_paired(int half_edge) const { return pairing_[half_edge] >= 0; }
    int partner(int half_edge) const { return pairing_[half_edge]; }
    int64_t revealed_count() const { return revealed_; }
    int64_t unpaired_count() const { return unpaired_; }
    bool vertex_touched(int v) const;

    // Pair the given free half-edge to a uniform free partner; returns the
    // partner. Throws if the half-edge is already paired or no partner exists.
    int reveal(int half_edge, Rng& rng);

    // Fill in the remaining matching uniformly at random and return the full
    // multigraph. Does not modify the state.
    Multigraph complete(Rng& rng) const;

    // Forget all revealed pairings; O(revealed), not O(n).
    void reset();

  private:
    int n_ = 0;
    int d_ = 0;
    int64_t revealed_ = 0;
    int64_t unpaired_ = 0;
    std::vector<int> pairing_;  // -1 = free
    std::vector<int> touched_;  // half-edges to clear on reset
};

struct ExplorationParams {
    double kappa = 4.0;        // security-radius coefficient
    double lambda_hat = 1.4;   // growth-rate estimate driving the generation cap
    int boundary_floor = 16;   // lower clamp on the boundary target (see derive)
};

// Quantities derived from (params, n, d):
//   a_n             = max(0, floor(kappa * log_{d-1} log n))
//   b_n             = (d-1)^{-a_n} * (log n)^{-6}
//   boundary_target = max(ceil(sqrt(n) * b_n), boundary_floor)
//   generation_cap  = ceil(log_{lambda_hat} n)
//   level_shift     = 1 / log n
// The raw boundary formula stays below 1 for every machine-feasible n (its
// crossover is astronomically large), so the floor is what keeps the target
// >= 1 and the run non-degenerate while preserving the vanishing
// cycle-frequency mechanism.
struct DerivedExplorationParams {
    int a_n = 0;
    double b_n = 0.0;
    int64_t boundary_target = 1;
    int generation_cap = 1;
    double level_shift = 0.0;
};

DerivedExplorationParams derive_exploration_params(const ExplorationParams& params, int n, int d);

enum class Verdict { successful, aborted, cycle_stopped, cap_stopped, root_rejected };
enum class ExploreMode { upper, lower };

const char* verdict_name(Verdict v);

struct ExplorationOutcome {
    Verdict verdict = Verdict::root_rejected;
    int64_t seen_count = 0;     // distinct vertices touched
    int generations = 0;        // admitted generations beyond the root
    int64_t tree_size = 0;      // admitted vertices
    int64_t boundary_size = 0;  // size of the last admitted generation

    // The explored tree T_x, BFS order, root first.
    std::vector<int> tree_vertices;       // graph vertex ids
    std::vector<int> tree_parent;         // index into these arrays, -1 at root
    std::vector<int> tree_depth;
    std::vector<double> tree_field;       // coupled tree-field values
    std::vector<uint64_t> tree_xi_index;  // reservoir index consumed per vertex

    // Every vertex that consumed a reservoir draw (root, then candidates in
    // draw order — admitted or not); index i used reservoir slot xi_base + i.
    std::vector<int> probe_order;
};

// Grow the cluster of x at level h (shifted by +level_shift in upper mode,
// -level_shift in lower mode). Per admitted generation: reveal the children,
// draw each candidate's field value, then reveal the security envelope of
// radius a_n around the admitted generation. Stops on the first triggered
// condition, checked in the order
//   C1 cycle (any reveal lands on an already seen vertex) -> cycle_stopped
//   C2 admitted generation >= boundary_target             -> successful
//   C3 admitted generation empty                          -> aborted
//   C4 generation index >= generation_cap                 -> cap_stopped
// Root stage: the field draw below the shifted level, or a cycle inside the
// radius-a_n root ball, gives root_rejected. x must be untouched in state.
ExplorationOutcome explore_component(LazyGraphState& state, int x, double h,
                                     const ExplorationParams& params, ExploreMode mode,
                                     Rng& pair_rng, const GaussianReservoir& reservoir,
                                     uint64_t xi_base = 0);

// Pair all free half-edges of vertices within distance radius-1 of the
// frontier (so the revealed region covers the radius-radius ball). Returns
// the ball subgraph and whether any reveal closed a cycle or touched a
// previously seen vertex (frontier vertices and vertices with any revealed
// pairing count as seen). Throws when a reveal is required but no free
// partner exists.
std::pair<Subgraph, bool> reveal_envelope(LazyGraphState& state, const std::vector<int>& frontier,
                                          int radius, Rng& rng);

struct GiantFractionEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int64_t replicas = 0;
    int64_t counts[5] = {0, 0, 0, 0, 0};  // indexed by Verdict
};

// Fraction of upper-mode explorations (fresh state, uniform start vertex)
// ending successful; estimates the giant-component density.
GiantFractionEstimate estimate_giant_fraction(int n, int d, double h,
                                              const ExplorationParams& params, int64_t replicas,
                                              Rng& rng);

}  // namespace gffperc
