#pragma once
// d-regular multigraphs represented as a perfect matching ("pairing") of the
// n*d half-edges; half-edge i belongs to vertex i/d. Loops and multi-edges
// are allowed and first-class. This module generates the matching uniformly
// at random and provides the structural queries (balls, tree excess,
// spectral gap, expander/locally-tree-like report) everything else builds on.

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "gffperc/rng.hpp"

namespace gffperc {

struct GreenMatrix;  // defined in green.hpp

struct Multigraph {
    int n = 0;  // vertex count
    int d = 0;  // degree, >= 3
    // pairing[i] = partner half-edge of i; fixed-point-free involution on
    // {0, ..., n*d-1}.
    std::vector<int> pairing;

    int half_edges() const { return n * d; }
    int vertex_of(int half_edge) const { return half_edge / d; }
    int half_edge(int vertex, int k) const { return vertex * d + k; }
    int neighbor(int vertex, int k) const { return vertex_of(pairing[vertex * d + k]); }
};

struct Subgraph {
    std::vector<int> vertices;                  // sorted, unique
    std::vector<std::pair<int, int>> edges;     // half-edge pairs, first < second
    int parent_d = 0;                           // degree of the parent multigraph

    int vertex_of(int half_edge) const { return half_edge / parent_d; }
};

struct GoodGraphThresholds {
    // Radius for cycle counting: floor(cycle_radius_coeff * log_{d-1} n).
    double cycle_radius_coeff = 0.25;
    // Radius for local Green checks: floor(green_radius_coeff * log_{d-1} log n).
    double green_radius_coeff = 2.0;
    double spectral_tol = 1e-9;
};

struct GoodGraphReport {
    double spectral_gap = 0.0;
    int max_cycles_in_log_ball = 0;      // max tree excess over radius-r balls
    double green_diag_error = 0.0;       // max |G(x,x) - (d-1)/(d-2)| over tree-like x
    double green_offdiag_error = 0.0;    // max |G(x,y) - 1/(d-2)| over adjacent y
    bool green_applicable = false;       // false when no vertex has a tree-like ball
    int cycle_radius = 0;
    int green_radius = 0;
    int tree_like_count = 0;
    GoodGraphThresholds thresholds_used;
};

// Uniform perfect matching on the n*d half-edges. Requires n >= 1, d >= 3,
// n*d even; deterministic given the stream.
Multigraph generate_configuration_model(int n, int d, Rng& rng);

// Rejection sampling: regenerate until the multigraph is simple. Throws after
// max_attempts consecutive non-simple draws.
Multigraph generate_simple_graph(int n, int d, Rng& rng, int max_attempts = 100000);

// True iff no loops and no repeated edges.
bool is_simple(const Multigraph& g);

bool is_connected(const Multigraph& g);

// Edges as vertex pairs in smallest-half-edge order; loops appear as (u,u),
// multi-edges repeat. Each edge listed once.
std::vector<std::pair<int, int>> edge_list(const Multigraph& g);

// tree excess: edges - vertices + number of connected components (0 iff forest).
int tree_excess(const Subgraph& s);

// Radius-R BFS ball around the center set, with all induced edges among the
// included vertices. Throws on an unknown vertex id.
Subgraph ball(const Multigraph& g, const std::vector<int>& centers, int radius);

// Directed-start variant: paths of length <= radius from x whose *first* step
// does not go through neighbor y (y may still be reached along longer paths).
Subgraph ball_directed(const Multigraph& g, int x, int y, int radius);

// 1 - lambda_2/d, lambda_2 = second-largest adjacency eigenvalue (loops count
// 2, multi-edges their multiplicity). Returns 0 for disconnected graphs.
// Dense eigensolve for n <= 512; above that, power iteration deflated against
// the constant vector, to absolute tolerance tol. Throws if the iteration
// fails to converge within max_iter steps.
double spectral_gap(const Multigraph& g, double tol, int max_iter = 500000);

// Measured expander/locally-tree-like quantities: spectral gap, the worst
// tree excess over radius-r_c balls, and the worst deviation of the Green
// matrix from its infinite-tree values over vertices whose radius-r_g ball is
// a tree (r_c, r_g from the thresholds record).
GoodGraphReport good_graph_report(const Multigraph& g, const GreenMatrix& green,
                                  const GoodGraphThresholds& params = {});

// Line-based text serialization: header "n d", then one "u v" line per edge
// in smallest-half-edge order.
void write_edge_list(std::ostream& out, const Multigraph& g);
Multigraph read_edge_list(std::istream& in);

}  // namespace gffperc
