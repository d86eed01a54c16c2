#include "wrmsm/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/random/normal_distribution.hpp>

#include "fft.hpp"
#include "wrmsm/errors.hpp"
#include "wrmsm/seed.hpp"

namespace wrmsm {

HurstDistribution::HurstDistribution(std::vector<double> modes, std::vector<double> probs) {
    if (modes.empty() || modes.size() != probs.size())
        throw ConfigError("Hurst distribution needs equally many modes and probabilities (at least one)");
    std::vector<std::size_t> order(modes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return modes[a] < modes[b]; });

    double total = 0.0;
    for (auto i : order) {
        const double h = modes[i], w = probs[i];
        if (!(h > 0.0 && h < 1.0)) {
            std::ostringstream os;
            os << "Hurst mode " << h << " outside (0,1)";
            throw ConfigError(os.str());
        }
        if (!(w > 0.0 && w <= 1.0)) {
            std::ostringstream os;
            os << "mode probability " << w << " outside (0,1]";
            throw ConfigError(os.str());
        }
        if (!modes_.empty() && !(h > modes_.back()))
            throw ConfigError("Hurst modes must be distinct");
        modes_.push_back(h);
        probs_.push_back(w);
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "mode probabilities sum to " << total << ", not 1";
        throw ConfigError(os.str());
    }
}

HurstDistribution HurstDistribution::point_mass(double h) { return {{h}, {1.0}}; }

HurstDistribution HurstDistribution::uniform(std::vector<double> modes) {
    std::vector<double> probs(modes.size(), modes.empty() ? 0.0 : 1.0 / modes.size());
    // Exact unit sum for sizes like 3 whose reciprocals do not add up to 1.
    if (!probs.empty())
        probs.back() = 1.0 - std::accumulate(probs.begin(), probs.end() - 1, 0.0);
    return {std::move(modes), std::move(probs)};
}

double HurstDistribution::min_gap() const noexcept {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < modes_.size(); ++i) gap = std::min(gap, modes_[i] - modes_[i - 1]);
    return gap;
}

void validate_panel(const Panel& panel) {
    if (panel.p() < 1) throw DataError("panel has no series");
    if (panel.n() < 2) throw DataError("panel needs at least 2 observations per series");
    if (!panel.data.allFinite()) throw DataError("panel contains non-finite entries");
}

std::vector<double> sample_hurst_diag(const HurstDistribution& dist, std::size_t p,
                                      std::uint64_t seed) {
    if (dist.size() == 0) throw ConfigError("empty Hurst distribution");
    if (p < 1) throw ConfigError("p must be at least 1");
    Rng rng(seed);
    std::discrete_distribution<std::size_t> pick(dist.probs().begin(), dist.probs().end());
    std::vector<double> out(p);
    for (auto& h : out) h = dist.modes()[pick(rng)];
    return out;
}

double fgn_autocov(double hurst, long long lag) noexcept {
    const double k = static_cast<double>(std::llabs(lag));
    const double e = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, e) - 2.0 * std::pow(k, e) + std::pow(std::abs(k - 1.0), e));
}

double fbm_cov(double hurst, double s, double t) noexcept {
    const double e = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(s), e) + std::pow(std::abs(t), e) - std::pow(std::abs(t - s), e));
}

namespace {

void check_hurst(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        std::ostringstream os;
        os << "Hurst exponent " << hurst << " outside (0,1)";
        throw DomainError(os.str());
    }
}

// Embedding length for n increments: next power of two, for the FFT.
Eigen::Index embedding_half(Eigen::Index n) {
    return static_cast<Eigen::Index>(std::bit_ceil(static_cast<std::size_t>(std::max<Eigen::Index>(n, 1))));
}

constexpr Eigen::Index kCholeskyLimit = 4096;

// Exact sampler for one (H, n); reusable across seeds.
class FbmSampler {
public:
    FbmSampler(double hurst, Eigen::Index n, FbmMethod method) : n_(n) {
        check_hurst(hurst);
        if (n < 1) throw ConfigError("fBm length must be positive");
        if (method != FbmMethod::cholesky) {
            auto lambda = circulant_eigenvalues(hurst, n);
            const double top = *std::max_element(lambda.begin(), lambda.end());
            const double low = *std::min_element(lambda.begin(), lambda.end());
            if (low >= -1e-10 * top) {
                scale_.resize(lambda.size());
                const double size = static_cast<double>(lambda.size());
                for (std::size_t k = 0; k < lambda.size(); ++k)
                    scale_[k] = std::sqrt(std::max(lambda[k], 0.0) / size);
                return;
            }
            if (method == FbmMethod::circulant)
                throw DegenerateError("circulant embedding of fGn is not positive semidefinite");
        }
        if (n > kCholeskyLimit) {
            std::ostringstream os;
            os << "circulant embedding failed and n = " << n << " exceeds the Cholesky limit "
               << kCholeskyLimit;
            throw DegenerateError(os.str());
        }
        chol_ = fbm_cholesky_factor(hurst, n);
    }

    Eigen::VectorXd sample(std::uint64_t seed) const {
        Rng rng(seed);
        boost::random::normal_distribution<double> gauss;
        if (chol_.size() > 0) {
            Eigen::VectorXd z(n_);
            for (auto& v : z) v = gauss(rng);
            return chol_ * z;
        }
        const std::size_t size = scale_.size();
        std::vector<std::complex<double>> out(size);
        for (std::size_t k = 0; k < size; ++k) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            out[k] = {scale_[k] * re, scale_[k] * im};
        }
        detail::fft_forward(out);
        Eigen::VectorXd path(n_);
        double acc = 0.0;
        for (Eigen::Index t = 0; t < n_; ++t) {
            acc += out[static_cast<std::size_t>(t)].real();
            path[t] = acc;
        }
        return path;
    }

private:
    Eigen::Index n_;
    std::vector<double> scale_;
    Eigen::MatrixXd chol_;
};

}  // namespace

Eigen::MatrixXd fbm_cholesky_factor(double hurst, Eigen::Index n) {
    check_hurst(hurst);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index s = 0; s < n; ++s)
        for (Eigen::Index t = 0; t <= s; ++t)
            cov(s, t) = cov(t, s) = fbm_cov(hurst, double(s + 1), double(t + 1));
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw DegenerateError("fBm covariance is not positive definite");
    return llt.matrixL();
}

std::vector<double> circulant_eigenvalues(double hurst, Eigen::Index n) {
    check_hurst(hurst);
    const Eigen::Index m = embedding_half(n);
    const std::size_t size = static_cast<std::size_t>(2 * m);
    // gamma(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2, one pow per lag.
    std::vector<double> power(static_cast<std::size_t>(m + 2));
    for (Eigen::Index k = 0; k <= m + 1; ++k)
        power[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k), 2.0 * hurst);
    auto gamma = [&](Eigen::Index k) {
        const auto i = static_cast<std::size_t>(k);
        return k == 0 ? 1.0 : 0.5 * (power[i + 1] - 2.0 * power[i] + power[i - 1]);
    };
    std::vector<std::complex<double>> spectrum(size);
    for (Eigen::Index k = 0; k <= m; ++k) spectrum[static_cast<std::size_t>(k)] = gamma(k);
    for (Eigen::Index k = 1; k < m; ++k) spectrum[size - static_cast<std::size_t>(k)] = gamma(k);
    detail::fft_forward(spectrum);
    std::vector<double> lambda(size);
    for (std::size_t k = 0; k < size; ++k) lambda[k] = spectrum[k].real();
    return lambda;
}

Eigen::VectorXd gen_fbm(double hurst, Eigen::Index n, std::uint64_t seed, FbmMethod method) {
    return FbmSampler(hurst, n, method).sample(seed);
}

Eigen::MatrixXd random_orthogonal(Eigen::Index p, std::uint64_t seed) {
    if (p < 1) throw ConfigError("orthogonal matrix dimension must be positive");
    Rng rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd g(p, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < p; ++i) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < p; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q;
}

SyntheticPanel gen_panel(const HurstDistribution& dist, Eigen::Index p, Eigen::Index n,
                         const std::optional<Eigen::MatrixXd>& mixing, std::uint64_t seed) {
    if (p < 1) throw ConfigError("p must be at least 1");
    if (n < 2) throw ConfigError("n must be at least 2");

    SyntheticPanel out;
    if (mixing) {
        if (mixing->rows() != p || mixing->cols() != p)
            throw DomainError("mixing matrix must be p x p");
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(*mixing);
        const auto& sv = svd.singularValues();
        if (!(sv.minCoeff() > sv.maxCoeff() * 1e-14) || !mixing->allFinite())
            throw DomainError("mixing matrix is singular");
        out.mixing = *mixing;
    } else {
        out.mixing = random_orthogonal(p, derive_seed(seed, {1}));
    }

    out.hurst = sample_hurst_diag(dist, static_cast<std::size_t>(p), derive_seed(seed, {0}));

    std::map<double, FbmSampler> samplers;
    Eigen::MatrixXd latent(p, n);
    for (Eigen::Index i = 0; i < p; ++i) {
        const double h = out.hurst[static_cast<std::size_t>(i)];
        auto it = samplers.find(h);
        if (it == samplers.end()) it = samplers.emplace(h, FbmSampler(h, n, FbmMethod::automatic)).first;
        latent.row(i) = it->second.sample(derive_seed(seed, {2, static_cast<std::uint64_t>(i)})).transpose();
    }
    out.observed.data = out.mixing * latent;
    out.latent.data = std::move(latent);
    out.latent.kind = PanelKind::latent;
    out.latent.seed = seed;
    out.observed.kind = PanelKind::observed;
    out.observed.seed = seed;
    return out;
}

}  // namespace wrmsm
