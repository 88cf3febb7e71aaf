#include "gffperc/gff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gffperc {

namespace {

std::string make_graph_ref(const Multigraph& g) {
    return "multigraph(n=" + std::to_string(g.n) + ",d=" + std::to_string(g.d) + ")";
}

}  // namespace

double Field::sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

std::vector<int> Field::level_set(double h) const {
    std::vector<int> out;
    for (size_t i = 0; i < values.size(); ++i)
        if (values[i] >= h) out.push_back(static_cast<int>(i));
    return out;
}

double field_max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

SpectralSampler::SpectralSampler(const Multigraph& g, const GreenMatrix& green)
    : n_(g.n), connected_(is_connected(g)), graph_ref_(make_graph_ref(g)) {
    if (!connected_) return;
    if (green.n != g.n) throw std::invalid_argument("SpectralSampler: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(green.values);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("SpectralSampler: eigendecomposition failed");
    // G is PSD with a one-dimensional kernel; clamp the tiny negative
    // eigenvalue roundoff at zero before taking the square root.
    Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    transfer_ = es.eigenvectors() * roots.asDiagonal();
}

Field SpectralSampler::sample(Rng& rng) const {
    Field f;
    f.graph_ref = graph_ref_;
    f.values.assign(n_, 0.0);
    if (!connected_) return f;
    Eigen::VectorXd xi(n_);
    for (int i = 0; i < n_; ++i) xi(i) = rng.next_normal();
    const Eigen::VectorXd psi = transfer_ * xi;
    for (int i = 0; i < n_; ++i) f.values[i] = psi(i);
    return f;
}

Field SpectralSampler::sample_at(const GaussianReservoir& reservoir, uint64_t first_index) const {
    Field f;
    f.graph_ref = graph_ref_;
    f.values.assign(n_, 0.0);
    if (!connected_) return f;
    Eigen::VectorXd xi(n_);
    for (int i = 0; i < n_; ++i) xi(i) = reservoir.xi(first_index + i);
    const Eigen::VectorXd psi = transfer_ * xi;
    for (int i = 0; i < n_; ++i) f.values[i] = psi(i);
    return f;
}

Field sample_exact(const Multigraph& g, const GreenMatrix& green, Rng& rng) {
    return SpectralSampler(g, green).sample(rng);
}

SparseFieldSampler::SparseFieldSampler(const Multigraph& g)
    : n_(g.n), d_(g.d), m_(g.half_edges() / 2), connected_(is_connected(g)),
      graph_ref_(make_graph_ref(g)) {
    if (!connected_) return;
    edges_ = edge_list(g);
    if (n_ < 2) return;
    // Laplacian L = d I - A with vertex 0 pinned (row/column removed); the
    // remaining principal submatrix is positive definite on a connected graph.
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(n_) * (d_ + 1));
    std::vector<double> diag(n_, static_cast<double>(d_));
    for (const auto& [u, v] : edges_) {
        if (u == v) {
            diag[u] -= 2.0;  // loops cancel out of the Laplacian
            continue;
        }
        if (u != 0 && v != 0) {
            triplets.emplace_back(u - 1, v - 1, -1.0);
            triplets.emplace_back(v - 1, u - 1, -1.0);
        }
    }
    for (int v = 1; v < n_; ++v) triplets.emplace_back(v - 1, v - 1, diag[v]);
    Eigen::SparseMatrix<double> pinned(n_ - 1, n_ - 1);
    pinned.setFromTriplets(triplets.begin(), triplets.end());
    pinned_laplacian_.compute(pinned);
    if (pinned_laplacian_.info() != Eigen::Success)
        throw std::runtime_error("SparseFieldSampler: Laplacian factorization failed");
}

Field SparseFieldSampler::from_normals(const std::vector<double>& gamma) const {
    Field f;
    f.graph_ref = graph_ref_;
    f.values.assign(n_, 0.0);
    if (!connected_ || n_ < 2) return f;
    // w = incidence * gamma; each non-loop edge pushes +gamma at one endpoint
    // and -gamma at the other, so w sums to zero exactly.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n_);
    for (int e = 0; e < m_; ++e) {
        const auto& [u, v] = edges_[e];
        if (u == v) continue;
        w(u) += gamma[e];
        w(v) -= gamma[e];
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n_);
    z.tail(n_ - 1) = pinned_laplacian_.solve(w.tail(n_ - 1) );
    // Shift into the mean-zero representative of the solution family, then
    // scale: covariance of sqrt(d) * L^+ w is d * L^+ = G.
    z.array() -= z.mean();
    z *= std::sqrt(static_cast<double>(d_));
    for (int i = 0; i < n_; ++i) f.values[i] = z(i);
    return f;
}

Field SparseFieldSampler::sample(Rng& rng) const {
    std::vector<double> gamma(m_);
    for (int e = 0; e < m_; ++e) gamma[e] = rng.next_normal();
    return from_normals(gamma);
}

Field SparseFieldSampler::sample_at(const GaussianReservoir& reservoir,
                                    uint64_t first_index) const {
    std::vector<double> gamma(m_);
    for (int e = 0; e < m_; ++e) gamma[e] = reservoir.xi(first_index + e);
    return from_normals(gamma);
}

Field sample_sequential(const Multigraph& g, const GreenMatrix& green,
                        const std::vector<int>& order, const GaussianReservoir& reservoir,
                        uint64_t first_index) {
    if (static_cast<int>(order.size()) != g.n)
        throw std::invalid_argument("sample_sequential: order must be a permutation of V");
    std::vector<char> seen(g.n, 0);
    for (int v : order) {
        if (v < 0 || v >= g.n || seen[v])
            throw std::invalid_argument("sample_sequential: order must be a permutation of V");
        seen[v] = 1;
    }
    Field f;
    f.graph_ref = make_graph_ref(g);
    f.values.assign(g.n, 0.0);
    if (!is_connected(g)) return f;

    std::vector<int> assigned;  // kept sorted, mirrors the hitting target
    assigned.reserve(g.n);
    for (int i = 0; i < g.n; ++i) {
        const int y = order[i];
        const double xi = reservoir.xi(first_index + i);
        if (i == 0) {
            f.values[y] = std::sqrt(green.values(y, y)) * xi;
        } else {
            const HittingProfile profile = hitting_profile(g, assigned);
            Eigen::VectorXd values(profile.target.size());
            for (size_t a = 0; a < profile.target.size(); ++a)
                values(a) = f.values[profile.target[a]];
            const ConditionalLaw law = conditional_law(g, green, profile, values, y);
            f.values[y] = law.mean + std::sqrt(law.variance) * xi;
        }
        assigned.insert(std::upper_bound(assigned.begin(), assigned.end(), y), y);
    }
    return f;
}

double tree_root_scale(int d) {
    if (d < 3) throw std::invalid_argument("tree_root_scale: d must be at least 3");
    return std::sqrt(static_cast<double>(d - 1) / (d - 2));
}

double tree_child_scale(int d) {
    if (d < 3) throw std::invalid_argument("tree_child_scale: d must be at least 3");
    return std::sqrt(static_cast<double>(d) / (d - 1));
}

double tree_gff_root(int d, Rng& rng) { return tree_root_scale(d) * rng.next_normal(); }

double tree_gff_root(int d, double xi) { return tree_root_scale(d) * xi; }

double tree_gff_child(double parent_value, double xi, int d) {
    return tree_child_scale(d) * xi + parent_value / (d - 1);
}

}  // namespace gffperc
