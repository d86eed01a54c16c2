#include "wrmsm/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "wrmsm/errors.hpp"

namespace wrmsm {

namespace {

constexpr double kVarianceFloor = 1e-12;

double log_normal_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

double log_sum_exp(const std::vector<double>& v) {
    const double top = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (double x : v) s += std::exp(x - top);
    return top + std::log(s);
}

void sort_components(GmmFit& fit) {
    std::vector<std::size_t> order(static_cast<std::size_t>(fit.k));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fit.means[a] < fit.means[b]; });
    GmmFit sorted = fit;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.weights[i] = fit.weights[order[i]];
        sorted.means[i] = fit.means[order[i]];
        sorted.variances[i] = fit.variances[order[i]];
    }
    fit = std::move(sorted);
}

}  // namespace

double gmm_loglik(std::span<const double> data, const GmmFit& fit) {
    std::vector<double> terms(static_cast<std::size_t>(fit.k));
    double ll = 0.0;
    for (double x : data) {
        for (int c = 0; c < fit.k; ++c) {
            const auto i = static_cast<std::size_t>(c);
            terms[i] = std::log(fit.weights[i]) + log_normal_pdf(x, fit.means[i], fit.variances[i]);
        }
        ll += log_sum_exp(terms);
    }
    return ll;
}

GmmFit fit_gmm(std::span<const double> data, int k, double tol, int max_iters) {
    const std::size_t n = data.size();
    if (k < 1) throw ConfigError("mixture needs at least one component");
    if (n < 2 * static_cast<std::size_t>(k)) {
        std::ostringstream os;
        os << "mixture with " << k << " components needs at least " << 2 * k << " points, got " << n;
        throw ConfigError(os.str());
    }

    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double var = 0.0;
    for (double x : sorted) var += (x - mean) * (x - mean);
    var /= n;
    if (!(var > kVarianceFloor)) throw DegenerateError("data have (numerically) zero variance");

    GmmFit fit;
    fit.k = k;
    fit.requested_k = k;
    for (int c = 0; c < k; ++c) {
        const double q = (c + 0.5) / k * (n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(q));
        const auto hi = std::min(lo + 1, n - 1);
        const double frac = q - std::floor(q);
        fit.means.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
        fit.variances.push_back(var);
        fit.weights.push_back(1.0 / k);
    }

    std::vector<std::vector<double>> resp(n, std::vector<double>(static_cast<std::size_t>(k)));
    double prev = -std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= max_iters; ++iter) {
        fit.iterations = iter;
        // E step.
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto& r = resp[i];
            r.resize(static_cast<std::size_t>(fit.k));
            for (int c = 0; c < fit.k; ++c) {
                const auto ci = static_cast<std::size_t>(c);
                r[ci] = std::log(fit.weights[ci]) + log_normal_pdf(data[i], fit.means[ci], fit.variances[ci]);
            }
            const double norm = log_sum_exp(r);
            ll += norm;
            for (auto& v : r) v = std::exp(v - norm);
        }
        if (ll < prev - 1e-9 * std::max(1.0, std::abs(prev))) fit.monotone = false;
        if (std::abs(ll - prev) < tol) {
            fit.loglik = ll;
            break;
        }
        prev = ll;
        fit.loglik = ll;

        // M step.
        std::vector<int> collapsed;
        for (int c = 0; c < fit.k; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            double nk = 0.0, mu = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                nk += resp[i][ci];
                mu += resp[i][ci] * data[i];
            }
            if (!(nk > 0.0)) {
                collapsed.push_back(c);
                continue;
            }
            mu /= nk;
            double s2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) s2 += resp[i][ci] * (data[i] - mu) * (data[i] - mu);
            s2 /= nk;
            fit.weights[ci] = nk / n;
            fit.means[ci] = mu;
            fit.variances[ci] = s2;
            if (!(s2 >= kVarianceFloor)) collapsed.push_back(c);
        }
        if (!collapsed.empty()) {
            for (auto it = collapsed.rbegin(); it != collapsed.rend(); ++it) {
                const auto ci = static_cast<std::size_t>(*it);
                fit.weights.erase(fit.weights.begin() + static_cast<std::ptrdiff_t>(ci));
                fit.means.erase(fit.means.begin() + static_cast<std::ptrdiff_t>(ci));
                fit.variances.erase(fit.variances.begin() + static_cast<std::ptrdiff_t>(ci));
            }
            fit.k -= static_cast<int>(collapsed.size());
            fit.collapsed += static_cast<int>(collapsed.size());
            if (fit.k < 1) throw DegenerateError("every mixture component collapsed");
            const double wsum = std::accumulate(fit.weights.begin(), fit.weights.end(), 0.0);
            for (auto& w : fit.weights) w /= wsum;
            // The likelihood of the reduced model is not comparable to the previous one.
            prev = -std::numeric_limits<double>::infinity();
        }
    }
    fit.loglik = gmm_loglik(data, fit);
    fit.bic = -2.0 * fit.loglik + (3.0 * fit.k - 1.0) * std::log(static_cast<double>(n));
    sort_components(fit);
    return fit;
}

GmmFit gmm_select(std::span<const double> data, int k_max, std::uint64_t /*seed*/) {
    if (k_max < 1) throw ConfigError("k_max must be at least 1");
    if (data.size() < 2 * static_cast<std::size_t>(k_max)) {
        std::ostringstream os;
        os << "GMM selection up to k = " << k_max << " needs at least " << 2 * k_max << " points";
        throw ConfigError(os.str());
    }
    GmmFit best;
    bool have = false;
    for (int k = 1; k <= k_max; ++k) {
        GmmFit fit = fit_gmm(data, k);
        if (!have || fit.bic < best.bic) {
            best = std::move(fit);
            have = true;
        }
    }
    return best;
}

GmmFit gmm_select(const LogEigenSet& h_set, int k_max, std::uint64_t seed) {
    return gmm_select(std::span<const double>(h_set.values), k_max, seed);
}

}  // namespace wrmsm
