#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "wrmsm/errors.hpp"
#include "wrmsm/synth.hpp"
#include "wrmsm/wavelet.hpp"
#include "wrmsm/wrm.hpp"

using namespace wrmsm;

namespace {

WaveletDecomposition with_details(std::map<int, Eigen::MatrixXd> details) {
    WaveletDecomposition d;
    d.j_min = details.begin()->first;
    d.j_max = details.rbegin()->first;
    for (auto& [j, m] : details) {
        d.counts[j] = m.cols();
        d.first_index[j] = 1;
        d.details[j] = m;
    }
    return d;
}

WaveletRandomMatrix wrm_of(const Eigen::MatrixXd& m, int octave = 5) {
    WaveletRandomMatrix w;
    w.matrix = m;
    w.octave = octave;
    w.effective_count = 1000;
    return w;
}

// Characteristic polynomial by Faddeev-LeVerrier, roots by bisection between
// sign changes on a fine grid over the Gershgorin interval.
std::vector<double> charpoly_roots(const Eigen::MatrixXd& A) {
    const Eigen::Index p = A.rows();
    std::vector<double> c(static_cast<std::size_t>(p) + 1);
    c[static_cast<std::size_t>(p)] = 1.0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index k = 1; k <= p; ++k) {
        M = A * M + c[static_cast<std::size_t>(p - k + 1)] * Eigen::MatrixXd::Identity(p, p);
        c[static_cast<std::size_t>(p - k)] = -(A * M).trace() / static_cast<double>(k);
    }
    auto poly = [&](double x) {
        double v = 0.0;
        for (Eigen::Index i = p; i >= 0; --i) v = v * x + c[static_cast<std::size_t>(i)];
        return v;
    };
    double R = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) R = std::max(R, A.row(i).cwiseAbs().sum());
    R += 1.0;
    std::vector<double> roots;
    const int grid = 200000;
    double x0 = -R, f0 = poly(x0);
    for (int g = 1; g <= grid; ++g) {
        const double x1 = -R + 2.0 * R * g / grid, f1 = poly(x1);
        if (f0 == 0.0) roots.push_back(x0);
        else if (f0 * f1 < 0.0) {
            double lo = x0, hi = x1, flo = f0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi), fm = poly(mid);
                if ((fm < 0) == (flo < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

// Exact variance of a detail coefficient of standard fBm at the given octave.
double detail_variance(double H, const FilterBank& bank, int octave) {
    std::vector<double> f = bank.lowpass, g = bank.highpass;
    for (int level = 1; level < octave; ++level) {
        const std::size_t step = std::size_t{1} << level;
        std::vector<double> nf((bank.lowpass.size() - 1) * step + f.size(), 0.0), ng(nf.size(), 0.0);
        for (std::size_t a = 0; a < bank.lowpass.size(); ++a)
            for (std::size_t m = 0; m < f.size(); ++m) {
                nf[m + step * a] += bank.lowpass[a] * f[m];
                ng[m + step * a] += bank.highpass[a] * f[m];
            }
        f = nf;
        g = ng;
    }
    // Detail filters annihilate constants, so the variance is shift invariant.
    double v = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s)
        for (std::size_t t = 0; t < g.size(); ++t)
            v -= 0.5 * g[s] * g[t] * std::pow(std::abs(double(s) - double(t)), 2 * H);
    return v;
}

}  // namespace

TEST_CASE("wavelet random matrix from a single shift") {
    Eigen::MatrixXd d(3, 1);
    d << 1.0, -2.0, 0.5;
    const auto w = wavelet_random_matrix(with_details({{4, d}}), 4);
    CHECK((w.matrix - d * d.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(w.matrix);
    CHECK(lu.rank() == 1);
    CHECK(w.undersampled);
    CHECK(w.effective_count == 1);
    CHECK(w.octave == 4);
}

TEST_CASE("sample covariance of white details") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    Eigen::MatrixXd d(4, 100000);
    for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = z(rng);
    const auto w = wavelet_random_matrix(with_details({{2, d}}), 2);
    CHECK((w.matrix - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.05);
    CHECK_FALSE(w.undersampled);
    // Oracle: plain double-precision Gram matrix.
    const Eigen::MatrixXd gram = d * d.transpose() / 100000.0;
    CHECK((w.matrix - gram).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(w.matrix == w.matrix.transpose());
}

TEST_CASE("wavelet random matrices are PSD") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = gen_panel(HurstDistribution::uniform({0.3, 0.6}), 12, 2048, std::nullopt, seed);
        const auto d = decompose(s.observed, daubechies(2), 5);
        for (int j = 1; j <= 5; ++j) {
            const auto w = wavelet_random_matrix(d, j);
            const auto ev = symmetric_eigenvalues(w.matrix);
            CHECK(ev.minCoeff() >= -1e-10 * w.matrix.trace());
        }
    }
}

TEST_CASE("eigenvalues match the characteristic polynomial") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index p = 1 + trial % 4;
        Eigen::MatrixXd A(p, p);
        for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = z(rng);
        A = (A + A.transpose()).eval();
        const auto ev = symmetric_eigenvalues(A);
        const auto roots = charpoly_roots(A);
        REQUIRE(roots.size() == static_cast<std::size_t>(p));
        for (Eigen::Index l = 0; l < p; ++l) CHECK(std::abs(ev[l] - roots[static_cast<std::size_t>(l)]) < 1e-8);
    }
}

TEST_CASE("single-scale inversion") {
    for (long long a : {2LL, 16LL, 64LL}) {
        const double H = 0.35;
        const auto h = log_eigen(wrm_of(std::pow(double(a), 2 * H + 1) * Eigen::MatrixXd::Identity(5, 5)), a);
        REQUIRE(h.size() == 5);
        for (double v : h.values) CHECK(v == doctest::Approx(H).epsilon(1e-12));
        CHECK(h.mode == LogEigenMode::single_scale);
        CHECK(h.scale_log == doctest::Approx(std::log(double(a))));

        const auto unit = log_eigen(wrm_of(Eigen::MatrixXd::Identity(3, 3)), a);
        for (double v : unit.values) CHECK(v == -0.5);
    }
}

TEST_CASE("single-scale output depends only on the sorted spectrum") {
    const Eigen::VectorXd lam = (Eigen::VectorXd(4) << 3.0, 0.5, 7.0, 1.5).finished();
    const auto base = log_eigen(wrm_of(Eigen::MatrixXd(lam.asDiagonal())), 16);
    CHECK(std::is_sorted(base.values.begin(), base.values.end()));
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto Q = random_orthogonal(4, seed);
        const Eigen::MatrixXd M = Q * lam.asDiagonal() * Q.transpose();
        const auto h = log_eigen(wrm_of(0.5 * (M + M.transpose())), 16);
        for (std::size_t l = 0; l < 4; ++l) CHECK(std::abs(h.values[l] - base.values[l]) < 1e-12);
    }
}

TEST_CASE("single-scale errors") {
    CHECK_THROWS_AS(log_eigen(wrm_of(Eigen::MatrixXd::Identity(2, 2)), 1), ConfigError);
    Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(log_eigen(wrm_of(singular), 16), DegenerateError);
    CHECK(scale_octave(16, 1) == 5);
    CHECK(scale_octave(2, 0) == 1);
    CHECK_THROWS_AS(scale_octave(12, 1), ConfigError);
    CHECK_THROWS_AS(scale_octave(16, -1), ConfigError);
}

TEST_CASE("single-scale statistics on a unimodal panel") {
    // With finite a the statistic carries the scale constant of the wavelet
    // variance; its median sits at the population value of that variance.
    const auto bank = daubechies(2);
    const int octave = scale_octave(16, 1);
    const double target = std::log(detail_variance(0.5, bank, octave)) / (2.0 * std::log(16.0)) - 0.5;
    std::vector<double> medians;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto s = gen_panel(HurstDistribution::point_mass(0.5), 64, 1 << 14, std::nullopt, seed);
        const auto h = log_eigen_at(decompose(s.observed, bank, octave), 16, 1);
        REQUIRE(h.size() == 64);
        CHECK(h.octave == octave);
        medians.push_back(0.5 * (h.values[31] + h.values[32]));
    }
    for (double m : medians) CHECK(std::abs(m - target) < 0.1);
}

TEST_CASE("multiscale regression") {
    SUBCASE("exact power law") {
        const std::vector<double> H{0.1, 0.45, 0.8};
        std::map<int, Eigen::MatrixXd> det;
        for (int j = 2; j <= 6; ++j) {
            Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
            for (int l = 0; l < 3; ++l) d(l, l) = std::sqrt(3.0 * std::pow(2.0, j * (2 * H[static_cast<std::size_t>(l)] + 1)));
            det[j] = d;
        }
        const auto h = log_eigen_multiscale(with_details(det), 2, 6);
        REQUIRE(h.size() == 3);
        for (std::size_t l = 0; l < 3; ++l) CHECK(std::abs(h.values[l] - H[l]) < 1e-12);
        CHECK(h.mode == LogEigenMode::multiscale);
        CHECK(h.j1 == 2);
        CHECK(h.j2 == 6);
    }

    SUBCASE("two octaves reduce to the two-point slope") {
        const auto s = gen_panel(HurstDistribution::uniform({0.3, 0.7}), 8, 4096, std::nullopt, 3);
        const auto d = decompose(s.observed, daubechies(2), 5);
        const auto h = log_eigen_multiscale(d, 3, 4);
        auto l3 = symmetric_eigenvalues(wavelet_random_matrix(d, 3).matrix);
        auto l4 = symmetric_eigenvalues(wavelet_random_matrix(d, 4).matrix);
        std::vector<double> expect;
        for (Eigen::Index l = 0; l < 8; ++l) expect.push_back((std::log2(l4[l]) - std::log2(l3[l]) - 1.0) / 2.0);
        std::sort(expect.begin(), expect.end());
        for (std::size_t l = 0; l < 8; ++l) CHECK(std::abs(h.values[l] - expect[l]) < 1e-12);
    }

    SUBCASE("unimodal panel") {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto s = gen_panel(HurstDistribution::point_mass(0.7), 16, 1 << 14, std::nullopt, seed);
            const auto h = log_eigen_multiscale(decompose(s.observed, daubechies(2), 5), 2, 5);
            double mean = 0.0;
            for (double v : h.values) mean += v / static_cast<double>(h.size());
            CHECK(std::abs(mean - 0.7) < 0.1);
        }
    }

    SUBCASE("window errors") {
        const auto d = decompose(gen_panel(HurstDistribution::point_mass(0.5), 2, 512, std::nullopt, 1).observed,
                                 daubechies(1), 4);
        CHECK_THROWS_AS(log_eigen_multiscale(d, 3, 3), ConfigError);
        CHECK_THROWS_AS(log_eigen_multiscale(d, 2, 5), DomainError);
    }
}

TEST_CASE("heuristic M") {
    std::map<int, Eigen::MatrixXd> det;
    det[3] = std::sqrt(2.0) * Eigen::MatrixXd::Identity(2, 2);
    CHECK(heuristic_M(with_details(det), 3, 16) == 0.0);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = std::sqrt(2.0);
    d(1, 1) = std::sqrt(2.0) * 16.0;  // eigenvalue ratio a^2
    det[3] = d;
    CHECK(heuristic_M(with_details(det), 3, 16) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(heuristic_M(with_details(det), 3, 1), ConfigError);
    det[3] = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(heuristic_M(with_details(det), 3, 16), DegenerateError);
}

TEST_CASE("heuristic M bounds the spread of the statistics") {
    const auto s = gen_panel(HurstDistribution::uniform({0.25, 0.35}), 64, 1 << 14, std::nullopt, 7);
    const auto d = decompose(s.observed, daubechies(2), 5);
    const auto h = log_eigen_at(d, 16, 1);
    const double M = heuristic_M(d, 5, 16);
    CHECK(M >= h.values.back() - h.values.front() - 1e-12);
}

TEST_CASE("rank-wise error shrinks as the panel grows") {
    struct Size {
        int log2n, log2p, j1, j2;
    };
    std::vector<double> err;
    for (Size sz : {Size{12, 4, 2, 5}, Size{14, 5, 3, 6}, Size{16, 6, 4, 7}}) {
        double acc = 0.0;
        const int reps = 5;
        for (int r = 0; r < reps; ++r) {
            const auto s = gen_panel(HurstDistribution::point_mass(0.4), 1 << sz.log2p, 1 << sz.log2n, std::nullopt,
                                     200 + static_cast<std::uint64_t>(r));
            const auto h = log_eigen_multiscale(decompose(s.observed, daubechies(2), sz.j2), sz.j1, sz.j2);
            double mx = 0.0;
            for (double v : h.values) mx = std::max(mx, std::abs(v - 0.4));
            acc += mx / reps;
        }
        err.push_back(acc);
    }
    CAPTURE(err[0]);
    CAPTURE(err[1]);
    CAPTURE(err[2]);
    CHECK(err[1] <= err[0]);
    CHECK(err[2] <= err[1]);
}
