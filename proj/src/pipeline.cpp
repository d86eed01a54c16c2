#include "wrmsm/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "wrmsm/errors.hpp"
#include "wrmsm/wavelet.hpp"
#include "wrmsm/wrm.hpp"

namespace wrmsm {

int PipelineConfig::required_octave() const {
    if (multiscale) return multiscale->second;
    return scale_octave(a, j);
}

void PipelineConfig::validate() const {
    if (multiscale) {
        if (multiscale->first < 1 || multiscale->first >= multiscale->second)
            throw ConfigError("multiscale window needs 1 <= j1 < j2");
    } else {
        scale_octave(a, j);
    }
    if (a < 2 || (a & (a - 1)) != 0) throw ConfigError("scale factor a must be a power of two >= 2");
    if (m < 1) throw ConfigError("m must be at least 1");
    if (M && !(*M > 0.0)) throw ConfigError("M must be positive");
    if (min_cluster < 1) throw ConfigError("min_cluster must be at least 1");
}

LogEigenSet compute_log_eigen(const Panel& panel, const PipelineConfig& config) {
    config.validate();
    const auto decomp = decompose(panel, daubechies(config.n_vanishing), config.required_octave());
    if (config.multiscale) return log_eigen_multiscale(decomp, config.multiscale->first, config.multiscale->second);
    return log_eigen_at(decomp, config.a, config.j);
}

namespace {

double auto_M_from(const WaveletDecomposition& decomp, const LogEigenSet& h_set,
                   const PipelineConfig& config) {
    double M = 0.0;
    if (config.multiscale) {
        M = h_set.values.back() - h_set.values.front();
    } else {
        M = heuristic_M(decomp, scale_octave(config.a, config.j), config.a);
    }
    if (!(M > 0.0)) {
        std::ostringstream os;
        os << "automatic grid bound M = " << M << " is not positive (log-eigenvalues coincide)";
        throw DegenerateError(os.str());
    }
    return M;
}

}  // namespace

double auto_M(const Panel& panel, const LogEigenSet& h_set, const PipelineConfig& config) {
    config.validate();
    const auto decomp = decompose(panel, daubechies(config.n_vanishing), config.required_octave());
    return auto_M_from(decomp, h_set, config);
}

PipelineOutput run_pipeline(const Panel& panel, const PipelineConfig& config) {
    config.validate();
    const auto decomp = decompose(panel, daubechies(config.n_vanishing), config.required_octave());
    PipelineOutput out;
    out.h_set = config.multiscale
                    ? log_eigen_multiscale(decomp, config.multiscale->first, config.multiscale->second)
                    : log_eigen_at(decomp, config.a, config.j);
    out.M = config.M ? *config.M : auto_M_from(decomp, out.h_set, config);
    SelectionOptions opts;
    opts.m = config.m;
    opts.seed = config.seed;
    opts.min_cluster = config.min_cluster;
    opts.keep_schemes = config.keep_schemes;
    out.result = select_model(out.h_set, out.M, opts);
    return out;
}

}  // namespace wrmsm
