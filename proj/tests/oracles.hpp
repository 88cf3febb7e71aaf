#pragma once
// Independent oracles for the test suite: hand-built pairings, brute-force
// graph algorithms, dense Schur conditioning, a heat-semigroup route to the
// Green matrix, and exhaustive matching enumeration. Everything here avoids
// the library's own code paths so the two routes stay independent.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "gffperc/multigraph.hpp"
#include "gffperc/rng.hpp"

namespace oracle {

// Build a multigraph from an explicit edge list (loops as (v,v)); each
// vertex's half-edges are assigned in edge order. Throws if degrees overflow
// or any half-edge stays free.
gffperc::Multigraph from_edges(int n, int d, const std::vector<std::pair<int, int>>& edges);

// m-cycle as a 2-regular multigraph.
gffperc::Multigraph cycle(int m);

// Complete graph K_k as a (k-1)-regular graph.
gffperc::Multigraph complete(int k);

// Two vertices joined by three parallel edges.
gffperc::Multigraph theta();

// Loop at each of two vertices plus one connecting... d=3 needs the third
// half-edge: vertex 0 loop + edge, vertex 1 loop + edge.
gffperc::Multigraph loops_and_bridge();

// Two disjoint K4s (n=8, d=3, disconnected).
gffperc::Multigraph two_k4s();

// Connected components of the subgraph induced on `subset`, largest first,
// ties by smallest vertex; plain repeated BFS over an adjacency scan.
std::vector<std::vector<int>> brute_components(const gffperc::Multigraph& g,
                                               const std::vector<int>& subset);

// 2-core of the induced subgraph by whole-scan peeling until stable.
std::vector<int> brute_two_core(const gffperc::Multigraph& g, const std::vector<int>& comp);

// Exact diameter of a connected induced subgraph by BFS from every vertex.
int brute_diameter(const gffperc::Multigraph& g, const std::vector<int>& comp);

// Gaussian conditioning via dense Schur complement on a covariance matrix.
struct SchurLaw {
    double mean = 0.0;
    double variance = 0.0;
};
SchurLaw schur_conditional(const Eigen::MatrixXd& G, const std::vector<int>& conditioned,
                           const std::vector<double>& values, int y);

// Sequential field construction on the first `prefix` vertices of `order`
// by repeated Schur conditioning, consuming reservoir slots first_index+i.
// The marginal law of a prefix does not depend on later assignments, so this
// reproduces the full sequential sampler on those vertices.
std::vector<double> schur_sequential_prefix(const Eigen::MatrixXd& G,
                                            const std::vector<int>& order, size_t prefix,
                                            const gffperc::GaussianReservoir& reservoir,
                                            uint64_t first_index);

// Second-largest-eigenvalue spectral gap via a dense symmetric eigensolve.
double dense_spectral_gap(const gffperc::Multigraph& g);

// Green matrix by integrating the continuous-time heat semigroup:
//   S = integral_0^T (e^{t(P-I)} - J/n) dt,  (I-P) S = I - J/n, S 1 = 0,
// RK4 time stepping with Simpson accumulation. Independent of the linear
// solve used by the library. Accuracy ~1e-8 for modest spectral gaps.
Eigen::MatrixXd heat_green(const gffperc::Multigraph& g, double t_max = 400.0, double dt = 0.01);

// All perfect matchings (fixed-point-free involutions) on half_edges points;
// half_edges must be even and small (count = (half_edges-1)!!).
void for_each_matching(int half_edges, const std::function<void(const std::vector<int>&)>& fn);

// Pearson statistic for observed bin counts against expected probabilities.
double chi_square_stat(const std::vector<int64_t>& observed,
                       const std::vector<double>& expected_probs);

// 0.999 quantile of chi-square with 3 degrees of freedom.
inline constexpr double kChiSq999Df3 = 16.266;

}  // namespace oracle
