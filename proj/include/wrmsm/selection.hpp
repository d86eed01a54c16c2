#pragma once

// Model selection over the precision grid eps_k = k M / m: run the fixed-eps
// clustering at every grid point and keep the scheme with the smallest ICSD.

#include <cstdint>
#include <optional>
#include <vector>

#include "wrmsm/cluster.hpp"

namespace wrmsm {

struct SelectionTrace {
    std::vector<double> grid;          // eps_1 < ... < eps_m
    std::vector<double> icsd_curve;
    std::vector<int> r_curve;          // r_hat at each grid point
    std::vector<bool> excluded;        // scheme had a cluster below min_cluster
    std::size_t chosen_index = 0;
    bool min_cluster_dropped = false;  // every grid point was excluded
    std::vector<std::optional<ClusterScheme>> schemes;  // empty entries in lean mode

    bool operator==(const SelectionTrace&) const = default;
};

struct EstimationResult {
    int r_hat = 0;
    std::vector<double> modes;
    std::vector<double> probs;
    double epsilon_ms = 0.0;
    double icsd = 0.0;
    double M = 0.0;
    ClusterScheme scheme;
    SelectionTrace trace;

    bool operator==(const EstimationResult&) const = default;
};

struct SelectionOptions {
    int m = 10;
    std::uint64_t seed = 0;
    int min_cluster = 2;
    bool keep_schemes = true;
};

/// Grid k M / m, k = 1..m.
std::vector<double> epsilon_grid(double M, int m);

/// Runs the clustering subroutine over the grid and selects by minimum ICSD
/// among grid points whose clusters all reach min_cluster; ties go to the
/// smaller eps. When no grid point qualifies the size constraint is dropped
/// with a warning.
EstimationResult select_model(const LogEigenSet& h_set, double M, const SelectionOptions& options);

}  // namespace wrmsm
