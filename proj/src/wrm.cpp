#include "wrmsm/wrm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wrmsm/errors.hpp"
#include "wrmsm/log.hpp"

namespace wrmsm {

WaveletRandomMatrix wavelet_random_matrix(const WaveletDecomposition& decomp, int octave) {
    const Eigen::MatrixXd& d = decomp.at(octave);
    const Eigen::Index p = d.rows();
    const Eigen::Index count = d.cols();
    if (count < 1) throw DegenerateError("no border-free coefficients at the requested octave");

    WaveletRandomMatrix out;
    out.octave = octave;
    out.effective_count = count;
    out.undersampled = p >= count;
    if (out.undersampled) {
        std::ostringstream os;
        os << "dimension p = " << p << " is not below the effective sample size n_j = " << count
           << " at octave " << octave;
        warn(os.str());
    }

    out.matrix.resize(p, p);
    std::vector<long double> acc(static_cast<std::size_t>(p));
    for (Eigen::Index a = 0; a < p; ++a) {
        std::fill(acc.begin(), acc.end(), 0.0L);
        for (Eigen::Index k = 0; k < count; ++k) {
            const long double da = d(a, k);
            for (Eigen::Index b = 0; b <= a; ++b) acc[static_cast<std::size_t>(b)] += da * d(b, k);
        }
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double v = static_cast<double>(acc[static_cast<std::size_t>(b)] / count);
            out.matrix(a, b) = v;
            out.matrix(b, a) = v;
        }
    }
    return out;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& matrix) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw DegenerateError("symmetric eigensolver did not converge");
    return solver.eigenvalues();
}

namespace {

void require_positive(const Eigen::VectorXd& lambda, int octave) {
    if (lambda.size() == 0) throw DomainError("empty wavelet random matrix");
    if (!(lambda.minCoeff() > 0.0)) {
        std::ostringstream os;
        os << "non-positive eigenvalue " << lambda.minCoeff() << " of the wavelet random matrix at octave "
           << octave << " (too few coefficients or rank-deficient panel)";
        throw DegenerateError(os.str());
    }
}

}  // namespace

LogEigenSet log_eigen(const WaveletRandomMatrix& wrm, long long a) {
    if (a < 2) throw ConfigError("scale factor a must be at least 2");
    const Eigen::VectorXd lambda = symmetric_eigenvalues(wrm.matrix);
    require_positive(lambda, wrm.octave);
    const double denom = 2.0 * std::log(static_cast<double>(a));
    LogEigenSet out;
    out.values.resize(static_cast<std::size_t>(lambda.size()));
    for (Eigen::Index l = 0; l < lambda.size(); ++l)
        out.values[static_cast<std::size_t>(l)] = std::log(lambda[l]) / denom - 0.5;
    std::sort(out.values.begin(), out.values.end());
    out.scale_log = std::log(static_cast<double>(a));
    out.mode = LogEigenMode::single_scale;
    out.octave = wrm.octave;
    return out;
}

int scale_octave(long long a, int j) {
    if (a < 2 || (a & (a - 1)) != 0) {
        std::ostringstream os;
        os << "scale factor a = " << a << " must be a power of two >= 2";
        throw ConfigError(os.str());
    }
    if (j < 0) throw ConfigError("octave j must be non-negative");
    int log2a = 0;
    while ((1LL << log2a) < a) ++log2a;
    return log2a + j;
}

LogEigenSet log_eigen_at(const WaveletDecomposition& decomp, long long a, int j) {
    return log_eigen(wavelet_random_matrix(decomp, scale_octave(a, j)), a);
}

LogEigenSet log_eigen_multiscale(const WaveletDecomposition& decomp, int j1, int j2) {
    if (!(j1 < j2)) throw ConfigError("multiscale window needs j1 < j2");
    std::vector<Eigen::VectorXd> log2_lambda;
    std::vector<double> weight, octave;
    for (int j = j1; j <= j2; ++j) {
        const auto wrm = wavelet_random_matrix(decomp, j);
        const Eigen::VectorXd lambda = symmetric_eigenvalues(wrm.matrix);
        require_positive(lambda, j);
        log2_lambda.push_back(lambda.array().log() / std::log(2.0));
        weight.push_back(static_cast<double>(wrm.effective_count));
        octave.push_back(static_cast<double>(j));
    }

    double wsum = 0.0, jbar = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
        wsum += weight[i];
        jbar += weight[i] * octave[i];
    }
    jbar /= wsum;
    double sjj = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) sjj += weight[i] * (octave[i] - jbar) * (octave[i] - jbar);

    const Eigen::Index p = log2_lambda.front().size();
    LogEigenSet out;
    out.values.resize(static_cast<std::size_t>(p));
    for (Eigen::Index l = 0; l < p; ++l) {
        double ybar = 0.0;
        for (std::size_t i = 0; i < weight.size(); ++i) ybar += weight[i] * log2_lambda[i][l];
        ybar /= wsum;
        double sjy = 0.0;
        for (std::size_t i = 0; i < weight.size(); ++i)
            sjy += weight[i] * (octave[i] - jbar) * (log2_lambda[i][l] - ybar);
        out.values[static_cast<std::size_t>(l)] = (sjy / sjj - 1.0) / 2.0;
    }
    std::sort(out.values.begin(), out.values.end());
    out.scale_log = j2 * std::log(2.0);
    out.mode = LogEigenMode::multiscale;
    out.j1 = j1;
    out.j2 = j2;
    return out;
}

double heuristic_M(const WaveletDecomposition& decomp, int j, long long a) {
    if (a < 2) throw ConfigError("scale factor a must be at least 2");
    const auto wrm = wavelet_random_matrix(decomp, j);
    const Eigen::VectorXd lambda = symmetric_eigenvalues(wrm.matrix);
    if (!(lambda.minCoeff() > 0.0)) {
        std::ostringstream os;
        os << "smallest eigenvalue of W(2^" << j << ") is not positive; heuristic M undefined";
        throw DegenerateError(os.str());
    }
    return std::max(0.0, std::log(lambda.maxCoeff() / lambda.minCoeff()) /
                             (2.0 * std::log(static_cast<double>(a))));
}

}  // namespace wrmsm
