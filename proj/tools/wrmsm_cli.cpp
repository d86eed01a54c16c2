// wrmsm: estimate the Hurst distribution of a panel, run Monte Carlo sweeps,
// or dump the wavelet log-eigenvalue histogram.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wrmsm/errors.hpp"
#include "wrmsm/harness.hpp"
#include "wrmsm/io.hpp"
#include "wrmsm/log.hpp"
#include "wrmsm/pipeline.hpp"

using nlohmann::json;
using namespace wrmsm;

namespace {

struct RunConfig {
    std::string input;
    std::string spec;
    std::optional<int> j, j1, j2;
    std::optional<long long> a;
    std::optional<int> m;
    std::string M = "auto";
    std::optional<int> min_cluster;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_vanishing;
    std::string output;
    std::string format = "json";
    int bins = 30;
    std::string scale = "hurst";
    bool raw = false;
};

void emit_error(ErrorKind kind, const std::string& message) {
    const char* name = kind == ErrorKind::config ? "config" : kind == ErrorKind::data ? "data" : "degenerate";
    json e = {{"schema", kSchema},
              {"error", {{"kind", name}, {"code", static_cast<int>(kind)}, {"message", message}}}};
    std::cerr << e.dump() << '\n';
}

void write_output(const RunConfig& rc, const std::string& text) {
    if (rc.output.empty() || rc.output == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(rc.output, std::ios::binary);
    if (!f) throw DataError("cannot write '" + rc.output + "'");
    f << text;
    if (!f) throw DataError("failed writing '" + rc.output + "'");
}

std::optional<double> parse_M(const std::string& s) {
    if (s == "auto") return std::nullopt;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("--M must be 'auto' or a positive number, got '" + s + "'");
    }
    if (used != s.size() || !(v > 0.0) || !std::isfinite(v))
        throw ConfigError("--M must be 'auto' or a positive number, got '" + s + "'");
    return v;
}

// Default for real panels is the multiscale window (2, 5); --a / --j opt into single scale.
PipelineConfig pipeline_config(const RunConfig& rc) {
    PipelineConfig c;
    const bool single = rc.j || rc.a;
    if (single && (rc.j1 || rc.j2)) throw ConfigError("give either --a/--j or --j1/--j2, not both");
    if (rc.j1.has_value() != rc.j2.has_value()) throw ConfigError("--j1 and --j2 must be given together");
    if (single) {
        if (rc.a) c.a = *rc.a;
        if (rc.j) c.j = *rc.j;
    } else {
        c.multiscale = std::make_pair(rc.j1.value_or(2), rc.j2.value_or(5));
    }
    if (rc.m) c.m = *rc.m;
    c.M = parse_M(rc.M);
    if (rc.min_cluster) c.min_cluster = *rc.min_cluster;
    if (rc.seed) c.seed = *rc.seed;
    if (rc.n_vanishing) c.n_vanishing = *rc.n_vanishing;
    c.validate();
    return c;
}

json config_json(const PipelineConfig& c) {
    json j = {{"n_vanishing", c.n_vanishing},
              {"m", c.m},
              {"M", c.M ? json(*c.M) : json("auto")},
              {"min_cluster", c.min_cluster},
              {"seed", c.seed}};
    if (c.multiscale) {
        j["mode"] = "multiscale";
        j["j1"] = c.multiscale->first;
        j["j2"] = c.multiscale->second;
    } else {
        j["mode"] = "single_scale";
        j["a"] = c.a;
        j["j"] = c.j;
    }
    return j;
}

std::vector<double> on_scale(const std::vector<double>& h, const std::string& scale) {
    if (scale == "hurst") return h;
    std::vector<double> out;
    out.reserve(h.size());
    for (double x : h) out.push_back(2.0 * x + 1.0);
    return out;
}

std::string histogram_csv(const Histogram& h) {
    std::ostringstream os;
    os << "lower,upper,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        os << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
    return os.str();
}

PanelFile load_panel(const RunConfig& rc) {
    auto file = read_panel_csv(rc.input);
    if (!rc.raw) file.panel = standardize(file.panel, file.names);
    return file;
}

void cmd_estimate(const RunConfig& rc) {
    const auto cfg = pipeline_config(rc);
    const auto file = load_panel(rc);
    const auto out = run_pipeline(file.panel, cfg);
    const auto& r = out.result;
    if (rc.format == "csv") {
        std::ostringstream os;
        os << "cluster,mode,prob,size\n";
        for (int k = 0; k < r.r_hat; ++k)
            os << k << ',' << format_double(r.modes[static_cast<std::size_t>(k)]) << ','
               << format_double(r.probs[static_cast<std::size_t>(k)]) << ','
               << r.scheme.clusters[static_cast<std::size_t>(k)].size() << '\n';
        write_output(rc, os.str());
        return;
    }
    json doc = {{"schema", kSchema},
                {"command", "estimate"},
                {"input", {{"path", rc.input}, {"p", file.panel.p()}, {"n", file.panel.n()},
                           {"series", file.names}, {"standardized", !rc.raw}}},
                {"config", config_json(cfg)},
                {"r_hat", r.r_hat},
                {"modes", r.modes},
                {"probs", r.probs},
                {"epsilon_ms", r.epsilon_ms},
                {"cointegration", r.r_hat > 1},
                {"result", to_json(r)},
                {"log_eigenvalues", to_json(out.h_set)},
                {"histogram", to_json(histogram(on_scale(out.h_set.values, rc.scale), rc.bins))},
                {"histogram_scale", rc.scale}};
    write_output(rc, doc.dump(2) + "\n");
}

ExperimentSpec load_spec(const RunConfig& rc) {
    auto spec = read_experiment_spec(rc.spec);
    if (rc.j || rc.a) {
        if (rc.j1 || rc.j2) throw ConfigError("give either --a/--j or --j1/--j2, not both");
        spec.multiscale.reset();
        if (rc.a) spec.a = *rc.a;
        if (rc.j) spec.j = *rc.j;
    } else if (rc.j1 || rc.j2) {
        if (rc.j1.has_value() != rc.j2.has_value()) throw ConfigError("--j1 and --j2 must be given together");
        spec.multiscale = std::make_pair(*rc.j1, *rc.j2);
    }
    if (rc.m) spec.m = *rc.m;
    if (rc.M != "auto") spec.M = parse_M(rc.M);
    if (rc.min_cluster) spec.min_cluster = *rc.min_cluster;
    if (rc.seed) spec.master_seed = *rc.seed;
    if (rc.n_vanishing) spec.n_vanishing = *rc.n_vanishing;
    spec.validate();
    for (const auto& w : spec.sanity_warnings()) warn(w);
    return spec;
}

void cmd_sweep(const RunConfig& rc) {
    const auto spec = load_spec(rc);
    const auto result = run_sweep(spec);
    if (rc.format == "csv") {
        std::ostringstream os;
        write_sweep_csv(os, result);
        write_output(rc, os.str());
        return;
    }
    json doc = to_json(result);
    doc["command"] = "sweep";
    doc["spec"] = to_json(spec);
    write_output(rc, doc.dump(2) + "\n");
}

void cmd_spectrum(const RunConfig& rc) {
    if (rc.input.empty() == rc.spec.empty()) throw ConfigError("spectrum needs exactly one of --input or --spec");
    json spectra = json::array();
    std::vector<Histogram> hists;
    if (!rc.input.empty()) {
        const auto cfg = pipeline_config(rc);
        const auto file = load_panel(rc);
        const auto h_set = compute_log_eigen(file.panel, cfg);
        hists.push_back(histogram(on_scale(h_set.values, rc.scale), rc.bins));
        spectra.push_back({{"source", rc.input},
                           {"log_eigenvalues", to_json(h_set)},
                           {"histogram", to_json(hists.back())}});
    } else {
        const auto spec = load_spec(rc);
        const auto configs = expand_configs(spec);
        for (std::size_t c = 0; c < configs.size(); ++c) {
            const auto panel = replication_panel(spec, configs, c, 0);
            const auto h_set = compute_log_eigen(panel.observed, spec.pipeline(0));
            hists.push_back(histogram(on_scale(h_set.values, rc.scale), rc.bins));
            spectra.push_back({{"delta", configs[c].delta},
                               {"modes", configs[c].dist.modes()},
                               {"probs", configs[c].dist.probs()},
                               {"log_eigenvalues", to_json(h_set)},
                               {"histogram", to_json(hists.back())}});
        }
    }
    if (rc.format == "csv") {
        std::string text;
        for (std::size_t k = 0; k < hists.size(); ++k) {
            if (k) text += "\n";
            text += histogram_csv(hists[k]);
        }
        write_output(rc, text);
        return;
    }
    json doc = {{"schema", kSchema}, {"command", "spectrum"}, {"scale", rc.scale}, {"spectra", spectra}};
    write_output(rc, doc.dump(2) + "\n");
}

void add_common(CLI::App* sub, RunConfig& rc) {
    const auto pow2 = CLI::Validator(
        [](std::string& s) -> std::string {
            long long v = 0;
            try {
                v = std::stoll(s);
            } catch (const std::exception&) {
                return "not an integer";
            }
            if (v < 2 || (v & (v - 1)) != 0) return "a must be a power of two >= 2";
            return {};
        },
        "POW2");
    sub->add_option("--j", rc.j, "octave offset for single-scale estimation (opt-in)")->check(CLI::NonNegativeNumber);
    sub->add_option("--a", rc.a, "scale factor, a power of two (single scale)")->check(pow2);
    sub->add_option("--j1", rc.j1, "finest octave of the multiscale window (default 2)")->check(CLI::PositiveNumber);
    sub->add_option("--j2", rc.j2, "coarsest octave of the multiscale window (default 5)")->check(CLI::PositiveNumber);
    sub->add_option("--m", rc.m, "number of precision grid points")->check(CLI::PositiveNumber);
    sub->add_option("--M", rc.M, "precision bound, 'auto' or a positive number")->capture_default_str();
    sub->add_option("--min_cluster", rc.min_cluster, "smallest admissible cluster size")->check(CLI::PositiveNumber);
    sub->add_option("--seed", rc.seed, "random seed");
    sub->add_option("--n_vanishing", rc.n_vanishing, "Daubechies vanishing moments (1..10)")->check(CLI::Range(1, 10));
    sub->add_option("--output", rc.output, "output file (default stdout)");
    sub->add_option("--format", rc.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hurst distribution estimation from wavelet random matrices"};
    app.require_subcommand(1);
    RunConfig rc;

    auto* est = app.add_subcommand("estimate", "estimate the Hurst distribution of a CSV panel");
    est->add_option("--input", rc.input, "panel CSV (columns = series)")->required();
    est->add_option("--bins", rc.bins, "histogram bins")->check(CLI::PositiveNumber)->capture_default_str();
    est->add_option("--scale", rc.scale, "histogram scale")->check(CLI::IsMember({"hurst", "exponent"}))->capture_default_str();
    est->add_flag("--raw", rc.raw, "skip standardization");
    add_common(est, rc);

    auto* sw = app.add_subcommand("sweep", "Monte Carlo identification sweep");
    sw->add_option("--spec", rc.spec, "experiment spec (key = value)")->required();
    add_common(sw, rc);

    auto* sp = app.add_subcommand("spectrum", "histogram of the log-eigenvalue statistics");
    sp->add_option("--input", rc.input, "panel CSV");
    sp->add_option("--spec", rc.spec, "experiment spec; one panel per configuration");
    sp->add_option("--bins", rc.bins, "histogram bins")->check(CLI::PositiveNumber)->capture_default_str();
    sp->add_option("--scale", rc.scale, "hurst (H) or exponent (2H + 1)")->check(CLI::IsMember({"hurst", "exponent"}))->capture_default_str();
    sp->add_flag("--raw", rc.raw, "skip standardization");
    add_common(sp, rc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error(ErrorKind::config, e.what());
        return static_cast<int>(ErrorKind::config);
    }

    try {
        if (*est) cmd_estimate(rc);
        else if (*sw) cmd_sweep(rc);
        else cmd_spectrum(rc);
    } catch (const Error& e) {
        emit_error(e.kind(), e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        emit_error(ErrorKind::degenerate, e.what());
        return static_cast<int>(ErrorKind::degenerate);
    }
    return 0;
}
