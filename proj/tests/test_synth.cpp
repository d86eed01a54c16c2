#include <doctest.h>

#include <cmath>
#include <map>

#include "wrmsm/errors.hpp"
#include "wrmsm/synth.hpp"

using namespace wrmsm;

namespace {

double sample_var(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("hurst distribution validation") {
    CHECK_THROWS_AS(HurstDistribution({0.0}, {1.0}), ConfigError);
    CHECK_THROWS_AS(HurstDistribution({1.0}, {1.0}), ConfigError);
    CHECK_THROWS_AS(HurstDistribution({0.3, 0.3}, {0.5, 0.5}), ConfigError);
    CHECK_THROWS_AS(HurstDistribution({0.3, 0.4}, {0.5, 0.6}), ConfigError);
    CHECK_THROWS_AS(HurstDistribution({0.3, 0.4}, {0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(HurstDistribution({0.3}, {0.5, 0.5}), ConfigError);

    HurstDistribution d({0.8, 0.2}, {0.25, 0.75});
    CHECK(d.modes() == std::vector<double>{0.2, 0.8});
    CHECK(d.probs() == std::vector<double>{0.75, 0.25});
    CHECK(d.min_gap() == doctest::Approx(0.6));
    CHECK(d.lowest() == 0.2);
    CHECK(std::isinf(HurstDistribution::point_mass(0.4).min_gap()));
}

TEST_CASE("point mass diag is constant") {
    const auto h = sample_hurst_diag(HurstDistribution::point_mass(0.5), 4, 9);
    CHECK(h == std::vector<double>{0.5, 0.5, 0.5, 0.5});
}

TEST_CASE("diag frequencies follow the law") {
    const std::size_t p = 300000;
    SUBCASE("uniform three modes") {
        const auto h = sample_hurst_diag(HurstDistribution::uniform({0.2, 0.5, 0.8}), p, 1);
        std::map<double, double> f;
        for (double x : h) f[x] += 1.0 / static_cast<double>(p);
        REQUIRE(f.size() == 3);
        for (auto [mode, freq] : f) CHECK(std::abs(freq - 1.0 / 3.0) < 0.01);
    }
    SUBCASE("one third two thirds") {
        const auto h = sample_hurst_diag(HurstDistribution({0.25, 0.5}, {1.0 / 3.0, 2.0 / 3.0}), p, 2);
        double low = 0.0;
        for (double x : h) low += (x == 0.25);
        CHECK(std::abs(low / static_cast<double>(p) - 1.0 / 3.0) < 0.01);
    }
}

TEST_CASE("brownian increments are uncorrelated") {
    const Eigen::Index n = 1 << 14;
    const auto b = gen_fbm(0.5, n, 17);
    std::vector<double> inc(static_cast<std::size_t>(n));
    inc[0] = b[0];
    for (Eigen::Index t = 1; t < n; ++t) inc[static_cast<std::size_t>(t)] = b[t] - b[t - 1];
    double m = 0.0;
    for (double v : inc) m += v;
    m /= static_cast<double>(n);
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t t = 0; t < inc.size(); ++t) {
        c0 += (inc[t] - m) * (inc[t] - m);
        if (t + 1 < inc.size()) c1 += (inc[t] - m) * (inc[t + 1] - m);
    }
    CHECK(std::abs(c1 / c0) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(c0 / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fbm variance and self-similarity") {
    const double H = 0.7;
    const Eigen::Index n = 256;
    const int paths = 10000;
    std::vector<double> at_half, at_quarter;
    for (int i = 0; i < paths; ++i) {
        const auto b = gen_fbm(H, n, 1000 + static_cast<std::uint64_t>(i));
        at_half.push_back(b[n / 2 - 1]);
        at_quarter.push_back(b[n / 4 - 1]);
    }
    const double v_half = sample_var(at_half);
    CHECK(std::abs(v_half / std::pow(n / 2.0, 2 * H) - 1.0) < 0.05);

    // B(2t) / 2^H has the law of B(t).
    std::vector<double> scaled;
    for (double x : at_half) scaled.push_back(x / std::pow(2.0, H));
    CHECK(std::abs(sample_var(scaled) / sample_var(at_quarter) - 1.0) < 0.05);
}

TEST_CASE("circulant paths have the fbm covariance") {
    const double H = 0.3;
    const Eigen::Index n = 64;
    const int paths = 20000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < paths; ++i) {
        const auto b = gen_fbm(H, n, 77 + static_cast<std::uint64_t>(i), FbmMethod::circulant);
        acc += b * b.transpose();
    }
    acc /= paths;
    for (Eigen::Index s : {0, 9, 31, 63})
        for (Eigen::Index t : {0, 20, 63}) {
            const double truth = fbm_cov(H, s + 1.0, t + 1.0);
            const double se = std::sqrt(fbm_cov(H, s + 1.0, s + 1.0) * fbm_cov(H, t + 1.0, t + 1.0) * 2.0 / paths);
            CHECK(std::abs(acc(s, t) - truth) < 5.0 * se);
        }
}

TEST_CASE("cholesky factor reproduces the covariance exactly") {
    for (double H : {0.1, 0.25, 0.5, 0.75, 0.95}) {
        for (Eigen::Index n : {1, 7, 64, 256}) {
            const auto L = fbm_cholesky_factor(H, n);
            const Eigen::MatrixXd C = L * L.transpose();
            double worst = 0.0;
            for (Eigen::Index s = 0; s < n; ++s)
                for (Eigen::Index t = 0; t < n; ++t)
                    worst = std::max(worst, std::abs(C(s, t) - fbm_cov(H, s + 1.0, t + 1.0)));
            CHECK(worst < 1e-8);
        }
    }
}

TEST_CASE("fgn autocovariance uses exponent 2H") {
    CHECK(fgn_autocov(0.5, 0) == doctest::Approx(1.0));
    CHECK(fgn_autocov(0.5, 3) == doctest::Approx(0.0));
    CHECK(fgn_autocov(0.7, 1) == doctest::Approx(0.5 * (std::pow(2.0, 1.4) - 2.0)));
    CHECK(fgn_autocov(0.7, -2) == doctest::Approx(fgn_autocov(0.7, 2)));
    CHECK(fbm_cov(0.3, 4.0, 4.0) == doctest::Approx(std::pow(4.0, 0.6)));
}

TEST_CASE("circulant embedding is nonnegative") {
    for (double H : {0.05, 0.25, 0.5, 0.75, 0.95}) {
        const auto lam = circulant_eigenvalues(H, 1000);
        double mx = 0.0, mn = 0.0;
        for (double l : lam) {
            mx = std::max(mx, l);
            mn = std::min(mn, l);
        }
        CHECK(mn >= -1e-10 * mx);
    }
}

TEST_CASE("cholesky and circulant agree in law on short paths") {
    const double H = 0.8;
    const Eigen::Index n = 32;
    double v_chol = 0.0, v_circ = 0.0;
    const int paths = 5000;
    for (int i = 0; i < paths; ++i) {
        v_chol += std::pow(gen_fbm(H, n, 5 + static_cast<std::uint64_t>(i), FbmMethod::cholesky)[n - 1], 2);
        v_circ += std::pow(gen_fbm(H, n, 5 + static_cast<std::uint64_t>(i), FbmMethod::circulant)[n - 1], 2);
    }
    const double truth = std::pow(static_cast<double>(n), 2 * H);
    CHECK(std::abs(v_chol / paths / truth - 1.0) < 0.06);
    CHECK(std::abs(v_circ / paths / truth - 1.0) < 0.06);
}

TEST_CASE("random orthogonal matrices") {
    for (Eigen::Index p : {1, 2, 5, 64}) {
        const auto M = random_orthogonal(p, 123 + static_cast<std::uint64_t>(p));
        const Eigen::MatrixXd G = M * M.transpose();
        CHECK((G - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(std::abs(M.determinant()) - 1.0) < 1e-10);
    }
    CHECK(random_orthogonal(8, 1) == random_orthogonal(8, 1));
    CHECK(random_orthogonal(8, 1) != random_orthogonal(8, 2));
}

TEST_CASE("panel generation") {
    const auto dist = HurstDistribution::uniform({0.25, 0.35});

    SUBCASE("reproducible") {
        const auto a = gen_panel(dist, 8, 512, std::nullopt, 42);
        const auto b = gen_panel(dist, 8, 512, std::nullopt, 42);
        CHECK(a.observed.data == b.observed.data);
        CHECK(a.hurst == b.hurst);
        const auto c = gen_panel(dist, 8, 512, std::nullopt, 43);
        CHECK(a.observed.data != c.observed.data);
    }

    SUBCASE("identity mixing keeps latent rows") {
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(6, 6);
        const auto s = gen_panel(HurstDistribution::point_mass(0.6), 6, 1024, I, 5);
        CHECK(s.observed.data == s.latent.data);
        for (double h : s.hurst) CHECK(h == 0.6);
    }

    SUBCASE("observed equals mixing times latent") {
        const auto s = gen_panel(dist, 6, 256, std::nullopt, 9);
        CHECK((s.observed.data - s.mixing * s.latent.data).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((s.mixing * s.mixing.transpose() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(s.observed.p() == 6);
        CHECK(s.observed.n() == 256);
    }

    SUBCASE("full-size panel") {
        const auto s = gen_panel(dist, 64, 1 << 14, std::nullopt, 1);
        CHECK(s.observed.p() == 64);
        CHECK(s.observed.n() == (1 << 14));
        for (double h : s.hurst) CHECK((h == 0.25 || h == 0.35));
    }

    SUBCASE("invalid mixing") {
        CHECK_THROWS_AS(gen_panel(dist, 4, 64, Eigen::MatrixXd::Identity(3, 3), 1), DomainError);
        Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(4, 4);
        CHECK_THROWS_AS(gen_panel(dist, 4, 64, singular, 1), DomainError);
    }
}

TEST_CASE("panel validation") {
    Panel p;
    p.data = Eigen::MatrixXd::Ones(2, 5);
    CHECK_NOTHROW(validate_panel(p));
    p.data(1, 3) = std::nan("");
    CHECK_THROWS_AS(validate_panel(p), DataError);
    p.data = Eigen::MatrixXd::Ones(2, 1);
    CHECK_THROWS_AS(validate_panel(p), DataError);
}
