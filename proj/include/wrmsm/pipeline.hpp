#pragma once

// Panel -> wavelet decomposition -> log-eigenvalues -> model selection.

#include <cstdint>
#include <optional>
#include <utility>

#include "wrmsm/selection.hpp"
#include "wrmsm/synth.hpp"

namespace wrmsm {

struct PipelineConfig {
    long long a = 16;                             // power of two
    int j = 1;                                    // single-scale octave offset
    std::optional<std::pair<int, int>> multiscale; // (j1, j2); overrides (a, j)
    int n_vanishing = 2;
    std::optional<double> M;                      // nullopt = automatic
    int m = 10;
    int min_cluster = 2;
    std::uint64_t seed = 0;
    bool keep_schemes = true;

    /// Deepest octave the decomposition must reach.
    int required_octave() const;
    void validate() const;
};

struct PipelineOutput {
    LogEigenSet h_set;
    double M = 0.0;
    EstimationResult result;
};

/// Log-eigenvalue statistics of a panel for the configured scale(s).
LogEigenSet compute_log_eigen(const Panel& panel, const PipelineConfig& config);

/// Automatic grid bound. Single-scale: the eigenvalue-ratio heuristic on the
/// analysis matrix W(a 2^j), i.e. the spread of the log-eigenvalues.
/// Multiscale: the range of the regressed log-eigenvalues.
double auto_M(const Panel& panel, const LogEigenSet& h_set, const PipelineConfig& config);

PipelineOutput run_pipeline(const Panel& panel, const PipelineConfig& config);

}  // namespace wrmsm
