#pragma once

// Panel ingestion, standardization and structured outputs (JSON / CSV).

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrmsm/harness.hpp"
#include "wrmsm/selection.hpp"

namespace wrmsm {

inline constexpr const char* kSchema = "wrmsm/1";

/// CSV panel: header row of series identifiers, optional leading time-index
/// column, one row per time point. The first column is taken as a time index
/// when its header cell is empty or any of its cells is not a number.
struct PanelFile {
    Panel panel;                          // p x n (series x time)
    std::vector<std::string> names;       // p identifiers
    std::vector<std::string> time_index;  // n labels, empty when absent
};

PanelFile parse_panel_csv(std::istream& in);
PanelFile read_panel_csv(const std::string& path);
void write_panel_csv(std::ostream& out, const Panel& panel, const std::vector<std::string>& names);

/// Divides each row by the sample standard deviation of its first differences.
/// Throws DataError naming the series when that deviation is zero.
Panel standardize(const Panel& panel, const std::vector<std::string>& names = {});

struct Histogram {
    std::vector<double> edges;   // bins + 1 ascending edges
    std::vector<long> counts;    // per bin; the last bin is closed on the right

    long total() const;
    bool operator==(const Histogram&) const = default;
};

/// Equal-width bins spanning [min, max] of the values.
Histogram histogram(const std::vector<double>& values, int bins);

nlohmann::json to_json(const ClusterScheme& s);
ClusterScheme scheme_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EstimationResult& r);
EstimationResult result_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LogEigenSet& h);
LogEigenSet log_eigen_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Histogram& h);
Histogram histogram_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentSpec& s);
nlohmann::json to_json(const SweepResult& r);
SweepResult sweep_from_json(const nlohmann::json& j);

/// One row per configuration and method:
/// delta,method,proportion,proportion_accurate,successes,failed,mean_epsilon_ms,mode_rmse,prob_rmse
/// Numbers are written with 17 significant digits.
void write_sweep_csv(std::ostream& out, const SweepResult& r);
/// Reads the table back into summaries (per-rep records are not part of the CSV).
std::vector<ConfigSummary> read_sweep_csv(std::istream& in);

/// Flat key = value experiment description; '#' starts a comment.
/// Keys: family, base, deltas, modes, probs, n, p, a, j, j1, j2, n_vanishing,
/// reps, m, M, min_cluster, methods, gmm_k_max, fix_mixing, seed, mode_tol,
/// prob_tol, threads.
ExperimentSpec parse_experiment_spec(std::istream& in);
ExperimentSpec read_experiment_spec(const std::string& path);

std::string format_double(double v);

}  // namespace wrmsm
