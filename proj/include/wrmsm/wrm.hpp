#pragma once

// Wavelet random matrices and the rescaled/shifted wavelet log-eigenvalues.

#include <vector>

#include <Eigen/Dense>

#include "wrmsm/wavelet.hpp"

namespace wrmsm {

struct WaveletRandomMatrix {
    Eigen::MatrixXd matrix;       // symmetric p x p
    int octave = 0;
    Eigen::Index effective_count = 0;
    bool undersampled = false;    // p >= effective_count
};

enum class LogEigenMode { single_scale, multiscale };

struct LogEigenSet {
    std::vector<double> values;   // ascending
    /// log a for single-scale sets; log 2^{j2} (coarsest scale regressed) for multiscale.
    double scale_log = 0.0;
    LogEigenMode mode = LogEigenMode::single_scale;
    int octave = 0;               // single-scale octave
    int j1 = 0, j2 = 0;           // multiscale octave window

    std::size_t size() const noexcept { return values.size(); }

    bool operator==(const LogEigenSet&) const = default;
};

/// (1/n_j) sum_k D(2^j,k) D(2^j,k)^T over the border-free shifts, accumulated
/// in extended precision. Warns when p >= n_j.
WaveletRandomMatrix wavelet_random_matrix(const WaveletDecomposition& decomp, int octave);

/// Ascending eigenvalues of a symmetric matrix.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& matrix);

/// H_l = log lambda_l / (2 log a) - 1/2, sorted. Throws DegenerateError when an
/// eigenvalue is not positive.
LogEigenSet log_eigen(const WaveletRandomMatrix& wrm, long long a);

/// Octave realizing scale a * 2^j; a must be a power of two >= 2.
int scale_octave(long long a, int j);

/// Single-scale statistics at scale a * 2^j of an existing decomposition.
LogEigenSet log_eigen_at(const WaveletDecomposition& decomp, long long a, int j);

/// Per rank l, weighted least-squares slope s_l of log2 lambda_l(W(2^j)) on j
/// over j1..j2 with weights n_j; H_l = (s_l - 1) / 2.
LogEigenSet log_eigen_multiscale(const WaveletDecomposition& decomp, int j1, int j2);

/// (1 / (2 log a)) log(lambda_max / lambda_min) of W(2^j).
double heuristic_M(const WaveletDecomposition& decomp, int j, long long a);

}  // namespace wrmsm
