#include "gffperc/green.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gffperc {

double green_tree(int d, int dist) {
    if (d < 3) throw std::invalid_argument("green_tree: d must be at least 3");
    if (dist < 0) throw std::invalid_argument("green_tree: dist must be nonnegative");
    return std::pow(static_cast<double>(d - 1), 1 - dist) / (d - 2);
}

Eigen::MatrixXd transition_matrix(const Multigraph& g) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(g.n, g.n);
    for (int he = 0; he < g.half_edges(); ++he) {
        // Each half-edge contributes one 1/d step from its vertex to the
        // partner's vertex; a loop's two half-edges give the 2/d diagonal.
        p(g.vertex_of(he), g.vertex_of(g.pairing[he])) += 1.0 / g.d;
    }
    return p;
}

Eigen::SparseMatrix<double> transition_matrix_sparse(const Multigraph& g) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(g.half_edges());
    for (int he = 0; he < g.half_edges(); ++he)
        triplets.emplace_back(g.vertex_of(he), g.vertex_of(g.pairing[he]), 1.0 / g.d);
    Eigen::SparseMatrix<double> p(g.n, g.n);
    p.setFromTriplets(triplets.begin(), triplets.end());
    return p;
}

GreenMatrix green_zero_average(const Multigraph& g) {
    if (!is_connected(g)) throw std::invalid_argument("green_zero_average: disconnected graph");
    const int n = g.n;
    const Eigen::MatrixXd p = transition_matrix(g);
    // (I - P) is singular (kernel = constants); adding J/n shifts the constant
    // mode to eigenvalue 1 without touching the mean-zero subspace, so
    // M = I - P + J/n is symmetric positive definite and
    // G = M^{-1} (I - J/n) is the zero-average solution.
    const Eigen::MatrixXd j_over_n = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - p + j_over_n;
    const Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(n, n) - j_over_n;
    Eigen::LDLT<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("green_zero_average: factorization failed");
    GreenMatrix green;
    green.n = n;
    green.values = solver.solve(rhs);
    // Exact symmetry is part of the contract; the solve is symmetric up to
    // roundoff, so symmetrize.
    green.values = 0.5 * (green.values + green.values.transpose()).eval();
    const double residual =
        ((Eigen::MatrixXd::Identity(n, n) - p) * green.values - rhs).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, green.values.cwiseAbs().maxCoeff());
    if (residual > 1e-10 * scale)
        throw std::runtime_error("green_zero_average: solve residual above tolerance");
    return green;
}

HittingProfile hitting_profile(const Multigraph& g, const std::vector<int>& target) {
    if (target.empty()) throw std::invalid_argument("hitting_profile: empty target");
    if (!is_connected(g)) throw std::invalid_argument("hitting_profile: disconnected graph");
    const int n = g.n;
    HittingProfile profile;
    profile.target = target;
    std::sort(profile.target.begin(), profile.target.end());
    profile.target.erase(std::unique(profile.target.begin(), profile.target.end()),
                         profile.target.end());
    for (int a : profile.target)
        if (a < 0 || a >= n) throw std::invalid_argument("hitting_profile: vertex out of range");
    const int na = static_cast<int>(profile.target.size());

    // Dense index of each vertex inside A (or -1), and the complement B.
    std::vector<int> in_target(n, -1);
    for (int i = 0; i < na; ++i) in_target[profile.target[i]] = i;
    std::vector<int> complement;
    complement.reserve(n - na);
    std::vector<int> b_index(n, -1);
    for (int v = 0; v < n; ++v) {
        if (in_target[v] < 0) {
            b_index[v] = static_cast<int>(complement.size());
            complement.push_back(v);
        }
    }
    const int nb = static_cast<int>(complement.size());

    profile.hit_expectation = Eigen::VectorXd::Zero(n);
    profile.hit_distribution = Eigen::MatrixXd::Zero(n, na);
    for (int i = 0; i < na; ++i) profile.hit_distribution(profile.target[i], i) = 1.0;

    if (nb > 0) {
        // Assemble I - P_BB (sparse, symmetric positive definite for a proper
        // subset of a connected graph) and the boundary flow P_BA.
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<size_t>(nb) * (g.d + 1));
        Eigen::MatrixXd p_ba = Eigen::MatrixXd::Zero(nb, na);
        for (int bi = 0; bi < nb; ++bi) {
            const int v = complement[bi];
            triplets.emplace_back(bi, bi, 1.0);
            for (int k = 0; k < g.d; ++k) {
                const int u = g.neighbor(v, k);
                if (b_index[u] >= 0)
                    triplets.emplace_back(bi, b_index[u], -1.0 / g.d);
                else
                    p_ba(bi, in_target[u]) += 1.0 / g.d;
            }
        }
        Eigen::SparseMatrix<double> system(nb, nb);
        system.setFromTriplets(triplets.begin(), triplets.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(system);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("hitting_profile: factorization failed");

        const Eigen::MatrixXd h_b = solver.solve(p_ba);
        const Eigen::VectorXd m_b = solver.solve(Eigen::VectorXd::Ones(nb));
        const double h_residual = (system * h_b - p_ba).cwiseAbs().maxCoeff();
        const double m_residual =
            (system * m_b - Eigen::VectorXd::Ones(nb)).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, m_b.cwiseAbs().maxCoeff());
        if (h_residual > 1e-10 || m_residual > 1e-10 * scale)
            throw std::runtime_error("hitting_profile: solve residual above tolerance");
        for (int bi = 0; bi < nb; ++bi) {
            profile.hit_expectation(complement[bi]) = m_b(bi);
            profile.hit_distribution.row(complement[bi]) = h_b.row(bi);
        }
    }
    profile.hit_column_sums = profile.hit_distribution.colwise().sum();
    profile.stationary_expectation = profile.hit_expectation.mean();
    return profile;
}

ConditionalLaw conditional_law(const Multigraph& g, const GreenMatrix& green,
                               const HittingProfile& profile, const Eigen::VectorXd& values,
                               int y) {
    (void)g;
    const int na = static_cast<int>(profile.target.size());
    if (values.size() != na)
        throw std::invalid_argument("conditional_law: values must be indexed like the target");
    if (y < 0 || y >= green.n) throw std::invalid_argument("conditional_law: vertex out of range");
    if (std::binary_search(profile.target.begin(), profile.target.end(), y))
        throw std::invalid_argument("conditional_law: y must lie outside the target set");

    const double n = static_cast<double>(green.n);
    const Eigen::VectorXd hit_y = profile.hit_distribution.row(y).transpose();
    const double mean_hit_value = hit_y.dot(values);
    const double stationary_hit_value = profile.hit_column_sums.dot(values) / n;
    const double time_ratio = profile.hit_expectation(y) / profile.stationary_expectation;

    Eigen::VectorXd green_ya(na);
    for (int i = 0; i < na; ++i) green_ya(i) = green.values(y, profile.target[i]);
    const double mean_hit_green = hit_y.dot(green_ya);
    const double stationary_hit_green = profile.hit_column_sums.dot(green_ya) / n;

    ConditionalLaw law;
    law.mean = mean_hit_value - time_ratio * stationary_hit_value;
    law.variance = green.values(y, y) - mean_hit_green + time_ratio * stationary_hit_green;
    law.variance = std::max(law.variance, 0.0);
    return law;
}

void write_green_csv(std::ostream& out, const GreenMatrix& green) {
    out.precision(17);
    for (int i = 0; i < green.n; ++i) {
        for (int j = 0; j < green.n; ++j) {
            if (j) out << ',';
            out << green.values(i, j);
        }
        out << '\n';
    }
}

}  // namespace gffperc
