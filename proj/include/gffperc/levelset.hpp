#pragma once
// Level sets of a field and the component-level observables: connected
// components, 2-core, kernel (degree-2 paths contracted), diameter, sampled
// pairwise distances, and the rooted-ball census with canonical tree codes.

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gffperc/gff.hpp"
#include "gffperc/multigraph.hpp"
#include "gffperc/rng.hpp"

namespace gffperc {

// Vertices with value >= h (ties included).
std::vector<int> level_set(const Field& f, double h);

struct ComponentDecomposition {
    double level = std::numeric_limits<double>::quiet_NaN();
    // Sorted by decreasing size; ties broken by smallest contained vertex id.
    // Each component is sorted ascending.
    std::vector<std::vector<int>> components;
    std::vector<int64_t> sizes;
};

ComponentDecomposition components(const Multigraph& g, const std::vector<int>& s,
                                  double level = std::numeric_limits<double>::quiet_NaN());

// Iteratively strip degree-<=1 vertices from the induced subgraph on the
// given component until min degree >= 2 (possibly empty). Loops count 2
// toward the degree.
Subgraph two_core(const Multigraph& g, const std::vector<int>& component);

struct KernelSummary {
    std::vector<int> vertices;                // degree >= 3 vertices of the core
    std::vector<std::pair<int, int>> edges;   // contracted chains, loops as (v,v)
    bool cycle_only = false;                  // nonempty core with no degree-3 vertex

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int64_t edge_count() const { return static_cast<int64_t>(edges.size()); }
};

// Contract every maximal degree-2 chain of a 2-core to a single edge. Input
// must have min degree >= 2 (throws otherwise). A core that is a pure cycle
// has no kernel vertex and is reported via cycle_only.
KernelSummary kernel(const Subgraph& core);

// Exact diameter of the induced subgraph on a connected component: BFS from
// every vertex up to 1e5 vertices, double sweep + iFUB refinement above.
int diameter(const Multigraph& g, const std::vector<int>& component);

// BFS distances for uniformly sampled ordered pairs (x != y) inside the
// component.
std::vector<int> sample_typical_distances(const Multigraph& g, const std::vector<int>& component,
                                          int pairs, Rng& rng);

// Canonical AHU code ("()" = single node, children codes sorted and
// concatenated) for a rooted tree given as children lists. Throws if a node
// repeats (cyclic or non-tree input).
struct RootedTree {
    int root = 0;
    std::vector<std::vector<int>> children;
};
std::string canonical_tree_code(const RootedTree& t);

// Reserved census key for balls that are not trees.
inline const std::string kNonTreeBallKey = "*";

// For each vertex of the component: the radius-k ball *within the component*
// is either a tree (counted under its canonical code) or not (counted under
// kNonTreeBallKey).
std::map<std::string, int64_t> ball_census(const Multigraph& g, const std::vector<int>& component,
                                           int k);

}  // namespace gffperc
