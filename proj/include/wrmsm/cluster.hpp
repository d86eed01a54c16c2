#pragma once

// Fixed-precision spectral clustering of wavelet log-eigenvalues: epsilon
// threshold graph, unnormalized Laplacian, eigengap mode count, spectral
// embedding and k-means.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wrmsm/wrm.hpp"

namespace wrmsm {

struct EpsilonGraph {
    Eigen::MatrixXd adjacency;  // symmetric 0/1, zero diagonal
    double epsilon = 0.0;
};

struct LaplacianSpectrum {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // column l pairs with eigenvalues[l]
};

struct ClusterScheme {
    std::vector<int> assignments;               // cluster label of each value, 0..r_hat-1
    std::vector<std::vector<std::size_t>> clusters;  // indices per label, ascending
    int r_hat = 0;
    std::vector<double> mode_estimates;         // per-cluster means, ascending
    std::vector<double> prob_estimates;         // |C_j| / p
    double icsd = 0.0;
    double epsilon_used = 0.0;

    std::size_t smallest_cluster() const;

    bool operator==(const ClusterScheme&) const = default;
};

/// Vertices i != j are adjacent iff |x_i - x_j| < eps.
EpsilonGraph epsilon_graph(std::span<const double> points, double eps);

/// L = D - A.
Eigen::MatrixXd laplacian_matrix(const EpsilonGraph& graph);

LaplacianSpectrum laplacian_spectrum(const EpsilonGraph& graph);

/// Smallest l in 1..p-1 maximizing theta_{l+1} - theta_l (eigenvalues ascending).
int eigengap_count(const LaplacianSpectrum& spectrum);
int eigengap_count(const Eigen::VectorXd& ascending_eigenvalues);

/// Rows of the p x r matrix of the first r eigenvectors.
Eigen::MatrixXd spectral_embed(const LaplacianSpectrum& spectrum, int r_hat);

struct KMeansResult {
    std::vector<int> labels;    // per point, 0..kappa-1
    Eigen::MatrixXd centers;    // kappa x d
    int iterations = 0;
    bool converged = false;     // centers stopped moving before the iteration cap
};

/// Number of distinct rows (exact comparison).
std::size_t distinct_rows(const Eigen::MatrixXd& points);

/// Lloyd's algorithm on the rows of `points`. Initial centers are kappa distinct
/// data points: a seeded first pick, then repeated farthest-point picks.
/// Empty clusters are reseeded at the point farthest from its own center.
KMeansResult kmeans(const Eigen::MatrixXd& points, int kappa, std::uint64_t seed,
                    int max_iters = 100);

/// Sum over clusters of the root-mean-square deviation from the cluster mean.
double icsd(std::span<const double> values, const std::vector<std::vector<std::size_t>>& clusters);

/// Builds the scheme (sorted by cluster mean) for a partition given by labels.
ClusterScheme make_scheme(std::span<const double> values, const std::vector<int>& labels,
                          double epsilon);

/// One pass of the epsilon-precision estimation subroutine.
ClusterScheme hdes(std::span<const double> values, double eps, std::uint64_t seed);
ClusterScheme hdes(const LogEigenSet& h_set, double eps, std::uint64_t seed);

}  // namespace wrmsm
