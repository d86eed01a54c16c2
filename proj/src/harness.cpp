#include "wrmsm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "wrmsm/errors.hpp"
#include "wrmsm/parallel.hpp"
#include "wrmsm/seed.hpp"

namespace wrmsm {

PipelineConfig ExperimentSpec::pipeline(std::uint64_t seed) const {
    PipelineConfig c;
    c.a = a;
    c.j = j;
    c.multiscale = multiscale;
    c.n_vanishing = n_vanishing;
    c.M = M;
    c.m = m;
    c.min_cluster = min_cluster;
    c.seed = seed;
    c.keep_schemes = false;
    return c;
}

void ExperimentSpec::validate() const {
    pipeline(0).validate();
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (p < 2) throw ConfigError("p must be at least 2");
    if (n < 2) throw ConfigError("n must be at least 2");
    if (!run_wrmsm && !run_gmm) throw ConfigError("no estimation method selected");
    if (run_gmm && (gmm_k_max < 1 || p < 2 * gmm_k_max))
        throw ConfigError("gmm_k_max must be in 1..p/2");
    if (deltas.empty() && family != Family::explicit_law) throw ConfigError("no deltas given");
    for (double d : deltas)
        if (d < 0.0) throw ConfigError("deltas must be non-negative");
    if (family == Family::explicit_law && modes.empty()) throw ConfigError("explicit family needs modes");
    expand_configs(*this);
}

std::vector<std::string> ExperimentSpec::sanity_warnings() const {
    std::vector<std::string> out;
    const long long scale = multiscale ? (1LL << multiscale->second) : a * (1LL << j);
    if (static_cast<double>(p) >= static_cast<double>(n) / static_cast<double>(scale)) {
        std::ostringstream os;
        os << "p = " << p << " is not below n / scale = " << n << " / " << scale
           << "; the wavelet random matrix may be rank deficient";
        out.push_back(os.str());
    }
    return out;
}

namespace {

HurstDistribution merged(const std::vector<double>& modes, const std::vector<double>& probs) {
    std::map<double, double> law;
    for (std::size_t i = 0; i < modes.size(); ++i) law[modes[i]] += probs[i];
    std::vector<double> m, w;
    for (auto [h, pr] : law) {
        m.push_back(h);
        w.push_back(pr);
    }
    // Renormalize against accumulated rounding.
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
    return {m, w};
}

std::vector<double> equal_probs(std::size_t r) {
    std::vector<double> w(r, 1.0 / static_cast<double>(r));
    return w;
}

}  // namespace

std::vector<SweepPoint> expand_configs(const ExperimentSpec& spec) {
    std::vector<SweepPoint> out;
    if (spec.family == Family::explicit_law) {
        auto probs = spec.probs.empty() ? equal_probs(spec.modes.size()) : spec.probs;
        if (probs.size() != spec.modes.size()) throw ConfigError("modes and probs differ in length");
        out.push_back({0.0, merged(spec.modes, probs)});
        return out;
    }
    for (double d : spec.deltas) {
        std::vector<double> modes;
        switch (spec.family) {
            case Family::bimodal: modes = {spec.base, spec.base + d}; break;
            case Family::trimodal_fixed: modes = {0.25, 0.25 + d, 0.7}; break;
            case Family::trimodal_equidistant: modes = {0.5 - d, 0.5, 0.5 + d}; break;
            case Family::explicit_law: break;
        }
        auto probs = spec.probs.empty() ? equal_probs(modes.size()) : spec.probs;
        if (probs.size() != modes.size()) {
            std::ostringstream os;
            os << "family needs " << modes.size() << " probabilities, got " << probs.size();
            throw ConfigError(os.str());
        }
        out.push_back({d, merged(modes, probs)});
    }
    return out;
}

std::uint64_t rep_seed(std::uint64_t master, std::size_t config, int rep) {
    return derive_seed(master, {static_cast<std::uint64_t>(config), static_cast<std::uint64_t>(rep)});
}

namespace {

MethodScore score(const HurstDistribution& truth, int r_hat, const std::vector<double>& modes,
                  const std::vector<double>& probs, const ExperimentSpec& spec) {
    MethodScore s;
    s.r_hat = r_hat;
    s.modes = modes;
    s.probs = probs;
    s.correct = r_hat == static_cast<int>(truth.size());
    if (s.correct) {
        for (std::size_t i = 0; i < truth.size(); ++i) {
            s.max_mode_error = std::max(s.max_mode_error, std::abs(modes[i] - truth.modes()[i]));
            s.max_prob_error = std::max(s.max_prob_error, std::abs(probs[i] - truth.probs()[i]));
        }
        s.accurate = s.max_mode_error < spec.mode_tol && s.max_prob_error < spec.prob_tol;
    }
    return s;
}

}  // namespace

SyntheticPanel replication_panel(const ExperimentSpec& spec, const std::vector<SweepPoint>& configs,
                                 std::size_t config, int rep) {
    std::optional<Eigen::MatrixXd> mixing;
    if (spec.fix_mixing)
        mixing = random_orthogonal(spec.p, derive_seed(spec.master_seed, {static_cast<std::uint64_t>(config), 0xF1F1ULL}));
    const std::uint64_t seed = rep_seed(spec.master_seed, config, rep);
    return gen_panel(configs.at(config).dist, spec.p, spec.n, mixing, derive_seed(seed, {0}));
}

RepRecord run_replication(const ExperimentSpec& spec, const std::vector<SweepPoint>& configs,
                          std::size_t config, int rep) {
    RepRecord rec;
    rec.config = config;
    rec.rep = rep;
    rec.seed = rep_seed(spec.master_seed, config, rep);
    const auto& truth = configs.at(config).dist;
    rec.r_true = static_cast<int>(truth.size());
    try {
        const auto panel = replication_panel(spec, configs, config, rep);
        const auto cfg = spec.pipeline(derive_seed(rec.seed, {1}));
        if (spec.run_wrmsm) {
            const auto out = run_pipeline(panel.observed, cfg);
            auto s = score(truth, out.result.r_hat, out.result.modes, out.result.probs, spec);
            s.epsilon_ms = out.result.epsilon_ms;
            rec.wrmsm = std::move(s);
            if (spec.run_gmm) {
                const auto fit = gmm_select(out.h_set, spec.gmm_k_max, derive_seed(rec.seed, {2}));
                rec.gmm = score(truth, fit.k, fit.means, fit.weights, spec);
            }
        } else {
            const auto h_set = compute_log_eigen(panel.observed, cfg);
            const auto fit = gmm_select(h_set, spec.gmm_k_max, derive_seed(rec.seed, {2}));
            rec.gmm = score(truth, fit.k, fit.means, fit.weights, spec);
        }
    } catch (const Error& e) {
        rec.ok = false;
        rec.error = e.what();
        rec.wrmsm.reset();
        rec.gmm.reset();
    }
    return rec;
}

ConfigSummary summarize(const ExperimentSpec& spec, const SweepPoint& point,
                        const std::vector<RepRecord>& records) {
    ConfigSummary out;
    out.delta = point.delta;
    out.modes = point.dist.modes();
    out.probs = point.dist.probs();
    for (const auto& r : records) {
        ++out.reps;
        if (!r.ok) ++out.failed;
    }
    auto collect = [&](const std::string& name, auto member) {
        MethodSummary m;
        m.method = name;
        double eps = 0.0, mode_ss = 0.0, prob_ss = 0.0;
        std::size_t mode_n = 0;
        for (const auto& r : records) {
            const auto& s = r.*member;
            if (!r.ok || !s) continue;
            ++m.successes;
            eps += s->epsilon_ms;
            if (s->correct) {
                ++m.correct;
                if (s->accurate) ++m.accurate;
                for (std::size_t i = 0; i < out.modes.size(); ++i) {
                    mode_ss += (s->modes[i] - out.modes[i]) * (s->modes[i] - out.modes[i]);
                    prob_ss += (s->probs[i] - out.probs[i]) * (s->probs[i] - out.probs[i]);
                    ++mode_n;
                }
            }
        }
        if (m.successes > 0) {
            m.proportion = static_cast<double>(m.correct) / m.successes;
            m.proportion_accurate = static_cast<double>(m.accurate) / m.successes;
            m.mean_epsilon_ms = eps / m.successes;
        }
        if (mode_n > 0) {
            m.mode_rmse = std::sqrt(mode_ss / static_cast<double>(mode_n));
            m.prob_rmse = std::sqrt(prob_ss / static_cast<double>(mode_n));
        }
        out.methods.push_back(std::move(m));
    };
    if (spec.run_wrmsm) collect("wrmsm", &RepRecord::wrmsm);
    if (spec.run_gmm) collect("gmm", &RepRecord::gmm);
    return out;
}

SweepResult run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const auto configs = expand_configs(spec);
    const std::size_t reps = static_cast<std::size_t>(spec.reps);
    SweepResult out;
    out.records.resize(configs.size() * reps);
    parallel_for(
        out.records.size(),
        [&](std::size_t i) {
            out.records[i] = run_replication(spec, configs, i / reps, static_cast<int>(i % reps));
        },
        spec.threads);
    for (std::size_t c = 0; c < configs.size(); ++c) {
        std::vector<RepRecord> slice(out.records.begin() + static_cast<std::ptrdiff_t>(c * reps),
                                     out.records.begin() + static_cast<std::ptrdiff_t>((c + 1) * reps));
        out.configs.push_back(summarize(spec, configs[c], slice));
    }
    return out;
}

}  // namespace wrmsm
