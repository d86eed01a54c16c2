#include "wrmsm/selection.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "wrmsm/errors.hpp"
#include "wrmsm/log.hpp"
#include "wrmsm/seed.hpp"

namespace wrmsm {

std::vector<double> epsilon_grid(double M, int m) {
    if (!(M > 0.0) || !std::isfinite(M)) {
        std::ostringstream os;
        os << "grid upper bound M = " << M << " must be positive and finite";
        throw ConfigError(os.str());
    }
    if (m < 1) throw ConfigError("grid size m must be at least 1");
    std::vector<double> grid(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) grid[static_cast<std::size_t>(k - 1)] = (k * M) / m;
    return grid;
}

EstimationResult select_model(const LogEigenSet& h_set, double M, const SelectionOptions& options) {
    if (h_set.values.empty()) throw DomainError("empty log-eigenvalue set");
    if (options.min_cluster < 1) throw ConfigError("min_cluster must be at least 1");

    SelectionTrace trace;
    trace.grid = epsilon_grid(M, options.m);
    const std::size_t m = trace.grid.size();
    std::vector<ClusterScheme> schemes(m);
    trace.icsd_curve.resize(m);
    trace.r_curve.resize(m);
    trace.excluded.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        // Seed keyed on the eps value so refined grids reuse the same draws.
        const double eps = trace.grid[k];
        schemes[k] = hdes(h_set, eps, derive_seed(options.seed, {std::bit_cast<std::uint64_t>(eps)}));
        trace.icsd_curve[k] = schemes[k].icsd;
        trace.r_curve[k] = schemes[k].r_hat;
        trace.excluded[k] = schemes[k].smallest_cluster() < static_cast<std::size_t>(options.min_cluster);
    }

    auto pick = [&](bool honor_exclusion) -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        for (std::size_t k = 0; k < m; ++k) {
            if (honor_exclusion && trace.excluded[k]) continue;
            if (!best || trace.icsd_curve[k] < trace.icsd_curve[*best]) best = k;
        }
        return best;
    };
    auto chosen = pick(true);
    if (!chosen) {
        std::ostringstream os;
        os << "every grid point produced a cluster smaller than " << options.min_cluster
           << "; selecting without the size constraint";
        warn(os.str());
        trace.min_cluster_dropped = true;
        chosen = pick(false);
    }
    trace.chosen_index = *chosen;

    EstimationResult out;
    out.scheme = schemes[*chosen];
    out.r_hat = out.scheme.r_hat;
    out.modes = out.scheme.mode_estimates;
    out.probs = out.scheme.prob_estimates;
    out.epsilon_ms = trace.grid[*chosen];
    out.icsd = out.scheme.icsd;
    out.M = M;
    trace.schemes.resize(m);
    if (options.keep_schemes)
        for (std::size_t k = 0; k < m; ++k) trace.schemes[k] = std::move(schemes[k]);
    else
        trace.schemes[*chosen] = out.scheme;
    out.trace = std::move(trace);
    return out;
}

}  // namespace wrmsm
