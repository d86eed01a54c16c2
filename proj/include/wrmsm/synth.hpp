#pragma once

// Synthetic measurements Y(t) = P X(t): independent fBm rows whose Hurst
// exponents are drawn from a discrete Hurst distribution, mixed by an
// invertible coordinates matrix.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace wrmsm {

/// Discrete law on (0,1): sorted support points ("modes") with probabilities.
class HurstDistribution {
public:
    HurstDistribution() = default;
    /// Validates and sorts; throws ConfigError on an invalid law.
    HurstDistribution(std::vector<double> modes, std::vector<double> probs);

    static HurstDistribution point_mass(double h);
    static HurstDistribution uniform(std::vector<double> modes);

    const std::vector<double>& modes() const noexcept { return modes_; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return modes_.size(); }

    /// Smallest gap between distinct modes; +inf for a single mode.
    double min_gap() const noexcept;
    /// Smallest mode (varpi).
    double lowest() const noexcept { return modes_.front(); }

private:
    std::vector<double> modes_;
    std::vector<double> probs_;
};

enum class PanelKind { latent, observed };

/// p x n real panel; rows are series, columns are time.
struct Panel {
    Eigen::MatrixXd data;
    PanelKind kind = PanelKind::observed;
    std::uint64_t seed = 0;

    Eigen::Index p() const noexcept { return data.rows(); }
    Eigen::Index n() const noexcept { return data.cols(); }
};

/// Throws DataError unless p >= 1, n >= 2 and every entry is finite.
void validate_panel(const Panel& panel);

/// p i.i.d. draws from the law.
std::vector<double> sample_hurst_diag(const HurstDistribution& dist, std::size_t p,
                                      std::uint64_t seed);

/// Autocovariance of unit-variance fractional Gaussian noise at integer lag k.
double fgn_autocov(double hurst, long long lag) noexcept;

/// Covariance of standard fBm: 0.5 (|s|^{2H} + |t|^{2H} - |t-s|^{2H}).
double fbm_cov(double hurst, double s, double t) noexcept;

/// Lower Cholesky factor of the covariance of (B_H(1), ..., B_H(n)).
Eigen::MatrixXd fbm_cholesky_factor(double hurst, Eigen::Index n);

/// Eigenvalues of the minimal circulant embedding of the fGn autocovariance
/// of length n (embedding size 2n). Entries may be slightly negative when the
/// embedding is not PSD.
std::vector<double> circulant_eigenvalues(double hurst, Eigen::Index n);

enum class FbmMethod { automatic, circulant, cholesky };

/// One exact fBm path B_H(1..n). The circulant path is used when its
/// embedding is PSD, otherwise the Cholesky factorization.
Eigen::VectorXd gen_fbm(double hurst, Eigen::Index n, std::uint64_t seed,
                        FbmMethod method = FbmMethod::automatic);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
Eigen::MatrixXd random_orthogonal(Eigen::Index p, std::uint64_t seed);

struct SyntheticPanel {
    Panel observed;              // Y = P X
    Panel latent;                // X
    std::vector<double> hurst;   // exponent of each latent row
    Eigen::MatrixXd mixing;
};

/// Latent rows are independent fBms; mixing defaults to a random orthogonal
/// matrix. A user mixing matrix must be p x p and invertible.
SyntheticPanel gen_panel(const HurstDistribution& dist, Eigen::Index p, Eigen::Index n,
                         const std::optional<Eigen::MatrixXd>& mixing, std::uint64_t seed);

}  // namespace wrmsm
