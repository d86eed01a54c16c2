#pragma once

// Monte Carlo driver: sweeps Hurst-distribution configurations, replicates
// synthetic panels through the estimation pipeline and scores the results.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wrmsm/gmm.hpp"
#include "wrmsm/pipeline.hpp"
#include "wrmsm/synth.hpp"

namespace wrmsm {

enum class Family { bimodal, trimodal_fixed, trimodal_equidistant, explicit_law };

struct ExperimentSpec {
    Family family = Family::bimodal;
    // bimodal: modes {base, base + delta}, probs as given (default uniform).
    // trimodal_fixed: {0.25, 0.25 + delta, 0.7}; trimodal_equidistant:
    // {0.5 - delta, 0.5, 0.5 + delta}; explicit: modes/probs below, one config.
    double base = 0.25;
    std::vector<double> deltas{0.0};
    std::vector<double> modes;
    std::vector<double> probs;

    Eigen::Index n = 1 << 14;
    Eigen::Index p = 1 << 6;
    long long a = 16;
    int j = 1;
    std::optional<std::pair<int, int>> multiscale;
    int n_vanishing = 2;

    int reps = 200;
    int m = 10;
    std::optional<double> M;
    int min_cluster = 2;
    bool run_wrmsm = true;
    bool run_gmm = false;
    int gmm_k_max = 5;
    bool fix_mixing = false;
    std::uint64_t master_seed = 1;
    // Thresholds for the "accurate" score: r_hat = r and max errors below these.
    double mode_tol = 0.05;
    double prob_tol = 0.1;
    unsigned threads = 0;

    PipelineConfig pipeline(std::uint64_t seed) const;
    void validate() const;
    /// Warnings about p >= n / (a 2^j) (or n_j at the coarsest multiscale octave).
    std::vector<std::string> sanity_warnings() const;
};

struct SweepPoint {
    double delta = 0.0;
    HurstDistribution dist;
};

/// Expands the family into concrete laws; coinciding modes are merged.
std::vector<SweepPoint> expand_configs(const ExperimentSpec& spec);

struct MethodScore {
    int r_hat = 0;
    bool correct = false;          // r_hat == r
    bool accurate = false;         // correct and errors within tolerances
    double max_mode_error = 0.0;   // only meaningful when correct
    double max_prob_error = 0.0;
    double epsilon_ms = 0.0;       // spectral method only
    std::vector<double> modes, probs;

    bool operator==(const MethodScore&) const = default;
};

struct RepRecord {
    std::size_t config = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    int r_true = 0;
    std::optional<MethodScore> wrmsm, gmm;

    bool operator==(const RepRecord&) const = default;
};

struct MethodSummary {
    std::string method;            // "wrmsm" or "gmm"
    int successes = 0;             // reps that ran
    int correct = 0;
    int accurate = 0;
    double proportion = 0.0;       // correct / successes
    double proportion_accurate = 0.0;
    double mean_epsilon_ms = 0.0;  // wrmsm only
    double mode_rmse = 0.0;        // over correct reps, all modes pooled
    double prob_rmse = 0.0;

    bool operator==(const MethodSummary&) const = default;
};

struct ConfigSummary {
    double delta = 0.0;
    std::vector<double> modes, probs;
    int reps = 0;
    int failed = 0;
    std::vector<MethodSummary> methods;

    bool operator==(const ConfigSummary&) const = default;
};

struct SweepResult {
    std::vector<ConfigSummary> configs;
    std::vector<RepRecord> records;  // config-major, rep-minor

    bool operator==(const SweepResult&) const = default;
};

/// Seed of one replication: derived from (master seed, config, rep).
std::uint64_t rep_seed(std::uint64_t master, std::size_t config, int rep);

/// Synthetic panel of one replication (mixing per spec.fix_mixing).
SyntheticPanel replication_panel(const ExperimentSpec& spec, const std::vector<SweepPoint>& configs,
                                 std::size_t config, int rep);

/// One replication in isolation; failures are captured in the record.
RepRecord run_replication(const ExperimentSpec& spec, const std::vector<SweepPoint>& configs,
                          std::size_t config, int rep);

/// Aggregates records of one configuration.
ConfigSummary summarize(const ExperimentSpec& spec, const SweepPoint& point,
                        const std::vector<RepRecord>& records);

SweepResult run_sweep(const ExperimentSpec& spec);

}  // namespace wrmsm
