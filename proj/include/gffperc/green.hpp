#pragma once
// Green functions: the closed form on the infinite d-regular tree, the exact
// zero-average Green matrix of a finite multigraph, hitting-time functionals
// of the simple random walk, and the conditional Gaussian law of the field at
// one vertex given its values on a set.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <vector>

#include "gffperc/multigraph.hpp"

namespace gffperc {

// Green function of the d-regular tree: (d-1)^(1-dist) / (d-2).
double green_tree(int d, int dist);

struct GreenMatrix {
    int n = 0;
    Eigen::MatrixXd values;  // symmetric, zero row sums, PSD with kernel = constants
};

// Degree-normalized transition kernel P = A/d; multi-edges enter with their
// multiplicity and a loop contributes 2/d at its vertex.
Eigen::MatrixXd transition_matrix(const Multigraph& g);
Eigen::SparseMatrix<double> transition_matrix_sparse(const Multigraph& g);

// Solves (I - P) G = I - J/n with G 1 = 0 (dense; intended for n up to a few
// thousand). Throws on disconnected input or when the solve residual exceeds
// the 1e-10 relative tolerance.
GreenMatrix green_zero_average(const Multigraph& g);

struct HittingProfile {
    std::vector<int> target;           // sorted target set A
    Eigen::VectorXd hit_expectation;   // E_x[H_A] per vertex (0 on A)
    Eigen::MatrixXd hit_distribution;  // n x |A|; row x = law of X_{H_A} started at x
    Eigen::VectorXd hit_column_sums;   // per a in A: sum_x P_x(X_{H_A} = a)
    double stationary_expectation = 0.0;  // E_pi[H_A], pi uniform
};

// Dirichlet-problem solves for the walk killed on the target set. Throws on
// an empty target or disconnected graph.
HittingProfile hitting_profile(const Multigraph& g, const std::vector<int>& target);

struct ConditionalLaw {
    double mean = 0.0;
    double variance = 0.0;
};

// Law of the field at y given its values on A:
//   mean = E_y[psi(X_H)] - (E_y[H]/E_pi[H]) * E_pi[psi(X_H)]
//   var  = G(y,y) - E_y[G(y,X_H)] + (E_y[H]/E_pi[H]) * E_pi[G(y,X_H)]
// with H the hitting time of A. values must be indexed like profile.target.
// Throws if y is in A.
ConditionalLaw conditional_law(const Multigraph& g, const GreenMatrix& green,
                               const HittingProfile& profile, const Eigen::VectorXd& values,
                               int y);

// Row-major CSV dump of the Green matrix.
void write_green_csv(std::ostream& out, const GreenMatrix& green);

}  // namespace gffperc
