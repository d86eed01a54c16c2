#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include "wrmsm/errors.hpp"
#include "wrmsm/pipeline.hpp"
#include "wrmsm/seed.hpp"
#include "wrmsm/selection.hpp"
#include "wrmsm/wavelet.hpp"
#include "wrmsm/wrm.hpp"

using namespace wrmsm;

namespace {

LogEigenSet make_set(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    LogEigenSet h;
    h.values = std::move(v);
    h.scale_log = std::log(16.0);
    return h;
}

LogEigenSet two_groups(std::uint64_t seed, double lo = 0.2, double hi = 0.8, double spread = 0.01) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<double> v;
    for (int i = 0; i < 32; ++i) v.push_back(lo + u(rng));
    for (int i = 0; i < 32; ++i) v.push_back(hi + u(rng));
    return make_set(v);
}

LogEigenSet noisy_groups(std::uint64_t seed, int groups, double sd) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, sd);
    std::vector<double> v;
    for (int g = 0; g < groups; ++g)
        for (int i = 0; i < 20; ++i) v.push_back(0.1 + 0.25 * g + z(rng));
    return make_set(v);
}

void check_argmin(const EstimationResult& r) {
    const auto& t = r.trace;
    const double chosen = t.icsd_curve[t.chosen_index];
    CHECK(r.icsd == chosen);
    CHECK(r.epsilon_ms == t.grid[t.chosen_index]);
    for (std::size_t k = 0; k < t.grid.size(); ++k) {
        if (!t.min_cluster_dropped && t.excluded[k]) continue;
        CHECK(chosen <= t.icsd_curve[k]);
        if (t.icsd_curve[k] == chosen) CHECK(t.chosen_index <= k);
    }
    if (!t.min_cluster_dropped) CHECK_FALSE(t.excluded[t.chosen_index]);
}

}  // namespace

TEST_CASE("precision grid") {
    const auto g = epsilon_grid(1.0, 10);
    REQUIRE(g.size() == 10);
    for (int k = 1; k <= 10; ++k) CHECK(g[static_cast<std::size_t>(k - 1)] == k / 10.0);
    CHECK(epsilon_grid(0.3, 1) == std::vector<double>{0.3});
    CHECK_THROWS_AS(epsilon_grid(0.0, 10), ConfigError);
    CHECK_THROWS_AS(epsilon_grid(-1.0, 10), ConfigError);
    CHECK_THROWS_AS(epsilon_grid(std::numeric_limits<double>::infinity(), 10), ConfigError);
    CHECK_THROWS_AS(epsilon_grid(1.0, 0), ConfigError);
    // Refinement keeps the coarse points bit-for-bit.
    const auto coarse = epsilon_grid(0.37, 7), fine = epsilon_grid(0.37, 14);
    for (std::size_t k = 0; k < coarse.size(); ++k) CHECK(coarse[k] == fine[2 * k + 1]);
}

TEST_CASE("two well separated groups") {
    const auto h = two_groups(1);
    SelectionOptions opt;
    opt.m = 10;
    opt.seed = 5;
    const auto r = select_model(h, 1.0, opt);
    CHECK(r.r_hat == 2);
    CHECK(r.modes.size() == 2);
    CHECK(std::abs(r.modes[0] - 0.2) < 0.01);
    CHECK(std::abs(r.modes[1] - 0.8) < 0.01);
    CHECK(r.probs == std::vector<double>{0.5, 0.5});
    CHECK(r.M == 1.0);
    check_argmin(r);
    // Exhaustive oracle: rerun the fixed-eps clustering at each grid point.
    for (std::size_t k = 0; k < r.trace.grid.size(); ++k) {
        const double eps = r.trace.grid[k];
        const auto s = hdes(h, eps, derive_seed(5, {std::bit_cast<std::uint64_t>(eps)}));
        CHECK(s.icsd == r.trace.icsd_curve[k]);
        CHECK(s.r_hat == r.trace.r_curve[k]);
        REQUIRE(r.trace.schemes[k].has_value());
        CHECK(*r.trace.schemes[k] == s);
    }
}

TEST_CASE("single grid point selects eps = M") {
    SelectionOptions opt;
    opt.m = 1;
    const auto r = select_model(two_groups(2), 0.45, opt);
    CHECK(r.epsilon_ms == 0.45);
    CHECK(r.trace.chosen_index == 0);
}

TEST_CASE("selection is deterministic and picks the argmin") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto h = noisy_groups(seed, 1 + static_cast<int>(seed % 3), 0.03);
        SelectionOptions opt;
        opt.seed = seed;
        const double M = h.values.back() - h.values.front();
        const auto a = select_model(h, M, opt);
        const auto b = select_model(h, M, opt);
        CHECK(a == b);
        check_argmin(a);
    }
}

TEST_CASE("refining the grid never raises the selected ICSD") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto h = noisy_groups(seed, 2 + static_cast<int>(seed % 2), 0.04);
        const double M = h.values.back() - h.values.front();
        for (int m : {3, 5, 10}) {
            SelectionOptions coarse, fine;
            coarse.m = m;
            fine.m = 2 * m;
            coarse.seed = fine.seed = seed;
            const auto rc = select_model(h, M, coarse);
            const auto rf = select_model(h, M, fine);
            if (rc.trace.min_cluster_dropped || rf.trace.min_cluster_dropped) continue;
            CHECK(rf.icsd <= rc.icsd);
            for (std::size_t k = 0; k < rc.trace.grid.size(); ++k)
                CHECK(rc.trace.icsd_curve[k] == rf.trace.icsd_curve[2 * k + 1]);
        }
    }
}

TEST_CASE("ties go to the smallest eps") {
    const auto r = select_model(make_set(std::vector<double>(8, 0.3)), 1.0, SelectionOptions{});
    CHECK(r.trace.chosen_index == 0);
    CHECK(r.r_hat == 1);
    CHECK(r.icsd == 0.0);
}

TEST_CASE("minimum cluster size") {
    // One outlier: small eps isolates it, producing a singleton.
    auto v = two_groups(3).values;
    v.push_back(2.0);
    const auto h = make_set(v);
    SelectionOptions opt;
    opt.m = 20;
    opt.min_cluster = 2;
    const auto r = select_model(h, 2.0, opt);
    CHECK(r.scheme.smallest_cluster() >= 2);
    bool any_excluded = false;
    for (std::size_t k = 0; k < r.trace.grid.size(); ++k)
        if (r.trace.excluded[k]) {
            any_excluded = true;
            CHECK(r.trace.schemes[k]->smallest_cluster() < 2);
        }
    CHECK(any_excluded);
    check_argmin(r);

    opt.min_cluster = 1000;
    const auto dropped = select_model(h, 2.0, opt);
    CHECK(dropped.trace.min_cluster_dropped);
    check_argmin(dropped);
}

TEST_CASE("lean trace keeps only the chosen scheme") {
    SelectionOptions opt;
    opt.keep_schemes = false;
    const auto r = select_model(two_groups(4), 1.0, opt);
    REQUIRE(r.trace.schemes.size() == 10);
    for (std::size_t k = 0; k < 10; ++k) CHECK(r.trace.schemes[k].has_value() == (k == r.trace.chosen_index));
    CHECK(*r.trace.schemes[r.trace.chosen_index] == r.scheme);
}

TEST_CASE("selection errors") {
    CHECK_THROWS_AS(select_model(LogEigenSet{}, 1.0, SelectionOptions{}), DomainError);
    SelectionOptions opt;
    opt.min_cluster = 0;
    CHECK_THROWS_AS(select_model(two_groups(1), 1.0, opt), ConfigError);
    CHECK_THROWS_AS(select_model(two_groups(1), 0.0, SelectionOptions{}), ConfigError);
}

TEST_CASE("pipeline wiring") {
    const auto s = gen_panel(HurstDistribution::uniform({0.25, 0.55}), 16, 4096, std::nullopt, 8);

    SUBCASE("single scale uses the eigenvalue-ratio bound of the analysis matrix") {
        PipelineConfig c;
        c.a = 16;
        c.j = 1;
        c.seed = 3;
        const auto out = run_pipeline(s.observed, c);
        const auto d = decompose(s.observed, daubechies(2), 5);
        CHECK(out.M == heuristic_M(d, 5, 16));
        CHECK(out.M == doctest::Approx(out.h_set.values.back() - out.h_set.values.front()).epsilon(1e-12));
        CHECK(out.h_set == log_eigen_at(d, 16, 1));
        CHECK(out.result.trace.grid.back() == out.M);
        CHECK(out.M == auto_M(s.observed, out.h_set, c));
    }
    SUBCASE("multiscale uses the range of the statistics") {
        PipelineConfig c;
        c.multiscale = std::make_pair(2, 5);
        const auto out = run_pipeline(s.observed, c);
        CHECK(out.M == out.h_set.values.back() - out.h_set.values.front());
        CHECK(out.h_set == compute_log_eigen(s.observed, c));
        CHECK(out.h_set.mode == LogEigenMode::multiscale);
        CHECK(c.required_octave() == 5);
    }
    SUBCASE("explicit M and reproducibility") {
        PipelineConfig c;
        c.multiscale = std::make_pair(2, 5);
        c.M = 0.5;
        c.m = 4;
        c.seed = 99;
        const auto a = run_pipeline(s.observed, c), b = run_pipeline(s.observed, c);
        CHECK(a.M == 0.5);
        CHECK(a.result.trace.grid == std::vector<double>{0.125, 0.25, 0.375, 0.5});
        CHECK(a.result == b.result);
    }
    SUBCASE("validation") {
        PipelineConfig c;
        c.a = 12;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = PipelineConfig{};
        c.multiscale = std::make_pair(3, 3);
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = PipelineConfig{};
        c.M = -1.0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = PipelineConfig{};
        c.m = 0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = PipelineConfig{};
        c.n_vanishing = 11;
        CHECK_THROWS_AS(run_pipeline(s.observed, c), ConfigError);
        c = PipelineConfig{};
        c.a = 1024;
        CHECK_THROWS_AS(run_pipeline(s.observed, c), ConfigError);
    }
    SUBCASE("rank-deficient panel") {
        Panel flat = s.observed;
        flat.data.row(1) = flat.data.row(0);
        PipelineConfig c;
        c.multiscale = std::make_pair(2, 5);
        CHECK_THROWS_AS(run_pipeline(flat, c), DegenerateError);
    }
}
