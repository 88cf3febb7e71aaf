#pragma once
// Samplers for the zero-average Gaussian free field on a finite multigraph
// and for the field on the d-regular tree.
//
// Three routes to the same finite-graph law:
//   * SpectralSampler  — eigendecomposition square root of the Green matrix
//                        (the reference construction; O(n^3) setup).
//   * SparseFieldSampler — psi = sqrt(d) * L^+ (incidence * gamma) with
//                        gamma i.i.d. standard normal per edge. The covariance
//                        is d * L^+ = G exactly, so this is an *exact* sampler
//                        too, but setup and per-sample cost are near-linear;
//                        it is the route for thousands of replicas.
//   * sample_sequential — vertex-by-vertex conditional sampling; quadratic
//                        per sample and kept as the validation path.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "gffperc/green.hpp"
#include "gffperc/multigraph.hpp"
#include "gffperc/rng.hpp"

namespace gffperc {

struct Field {
    std::vector<double> values;
    std::string graph_ref;

    double sum() const;
    std::vector<int> level_set(double h) const;  // {x : values[x] >= h}
};

double field_max_abs(const Field& f);

// Exact sampler via the spectral square root of G restricted to the mean-zero
// subspace. Disconnected graphs yield the all-zero field. Consumes n normals
// per sample.
class SpectralSampler {
  public:
    SpectralSampler(const Multigraph& g, const GreenMatrix& green);

    Field sample(Rng& rng) const;
    Field sample_at(const GaussianReservoir& reservoir, uint64_t first_index) const;

    // The linear map from the normal vector to the field; transfer * transfer^T
    // equals the Green matrix.
    const Eigen::MatrixXd& transfer() const { return transfer_; }

  private:
    int n_ = 0;
    bool connected_ = false;
    Eigen::MatrixXd transfer_;
    std::string graph_ref_;
};

// One-shot convenience wrapper around SpectralSampler.
Field sample_exact(const Multigraph& g, const GreenMatrix& green, Rng& rng);

// Exact sampler in near-linear time: one standard normal per edge (loops
// consume a draw but contribute nothing), one sparse back-substitution, one
// mean subtraction. Consumes n*d/2 normals per sample.
class SparseFieldSampler {
  public:
    explicit SparseFieldSampler(const Multigraph& g);

    Field sample(Rng& rng) const;
    Field sample_at(const GaussianReservoir& reservoir, uint64_t first_index) const;

    int normals_per_sample() const { return m_; }

  private:
    Field from_normals(const std::vector<double>& gamma) const;

    int n_ = 0;
    int d_ = 0;
    int m_ = 0;  // edge count n*d/2
    bool connected_ = false;
    std::vector<std::pair<int, int>> edges_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> pinned_laplacian_;  // vertex 0 removed
    std::string graph_ref_;
};

// Vertex-by-vertex construction along the given visit order: the first vertex
// gets sqrt(G(x,x)) * xi, every later one its conditional mean plus
// sqrt(conditional variance) * xi. Consumes reservoir indices
// [first_index, first_index + n). Distributionally identical to sample_exact.
Field sample_sequential(const Multigraph& g, const GreenMatrix& green,
                        const std::vector<int>& order, const GaussianReservoir& reservoir,
                        uint64_t first_index = 0);

// Field on the d-regular tree: root scale sqrt((d-1)/(d-2)), child value
// sqrt(d/(d-1)) * xi + parent/(d-1).
double tree_root_scale(int d);
double tree_child_scale(int d);
double tree_gff_root(int d, Rng& rng);
double tree_gff_root(int d, double xi);
double tree_gff_child(double parent_value, double xi, int d);

}  // namespace gffperc
