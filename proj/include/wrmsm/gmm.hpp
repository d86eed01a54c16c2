#pragma once

// One-dimensional Gaussian mixtures with unequal variances, fitted by EM and
// selected by BIC. Baseline clustering method for the log-eigenvalues.

#include <cstdint>
#include <span>
#include <vector>

#include "wrmsm/wrm.hpp"

namespace wrmsm {

struct GmmFit {
    int k = 0;
    std::vector<double> weights, means, variances;  // sorted by mean
    double loglik = 0.0;
    double bic = 0.0;          // -2 loglik + (3k - 1) log n
    int iterations = 0;
    int requested_k = 0;
    int collapsed = 0;         // components removed for variance collapse
    bool monotone = true;      // loglik never decreased between EM steps
};

/// EM for a fixed number of components from a quantile initialization:
/// means at the (i + 1/2)/k sample quantiles, common variance = sample variance,
/// equal weights. Stops when the loglik change is below tol or after max_iters.
GmmFit fit_gmm(std::span<const double> data, int k, double tol = 1e-8, int max_iters = 500);

/// Fits k = 1..k_max and returns the fit with the smallest bic. The
/// initialization is deterministic; the seed is accepted for interface
/// symmetry with the spectral method and does not affect the result.
GmmFit gmm_select(std::span<const double> data, int k_max, std::uint64_t seed = 0);
GmmFit gmm_select(const LogEigenSet& h_set, int k_max, std::uint64_t seed = 0);

/// Log-likelihood of data under a mixture.
double gmm_loglik(std::span<const double> data, const GmmFit& fit);

}  // namespace wrmsm
