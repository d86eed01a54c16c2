#include "wrmsm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "wrmsm/errors.hpp"

namespace wrmsm {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// RFC 4180 style splitting: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false, was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            out.push_back(was_quoted ? cur : trim(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur += c;
        }
    }
    if (quoted) throw DataError("unterminated quote on line " + std::to_string(line_no));
    out.push_back(was_quoted ? cur : trim(cur));
    return out;
}

bool parse_number(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = b + s.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && ptr == e;
}

bool is_missing(const std::string& s) {
    const std::string l = lower(s);
    return l.empty() || l == "na" || l == "nan" || l == "null" || l == "." || l == "-";
}

double parse_double_field(const std::string& s, const std::string& what) {
    double v;
    if (!parse_number(s, v)) throw ConfigError("invalid number for " + what + ": '" + s + "'");
    return v;
}

long long parse_int_field(const std::string& s, const std::string& what) {
    long long v;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("invalid integer for " + what + ": '" + s + "'");
    return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
        cur = trim(cur);
        if (cur.empty()) continue;
        out.push_back(parse_double_field(cur, what));
    }
    return out;
}

// Non-finite values are not representable in JSON numbers; they travel as strings.
json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double get_num(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw DataError("expected a number in JSON document, got " + j.dump());
}

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::vector<double> get_nums(const json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(get_num(x));
    return out;
}

void check_schema(const json& j) {
    if (!j.is_object() || !j.contains("schema") || j.at("schema") != kSchema)
        throw DataError(std::string("document is not a ") + kSchema + " document");
}

const char* family_name(Family f) {
    switch (f) {
        case Family::bimodal: return "bimodal";
        case Family::trimodal_fixed: return "trimodal_fixed";
        case Family::trimodal_equidistant: return "trimodal_equidistant";
        case Family::explicit_law: return "explicit";
    }
    return "bimodal";
}

Family parse_family(const std::string& s) {
    const std::string l = lower(s);
    if (l == "bimodal") return Family::bimodal;
    if (l == "trimodal_fixed" || l == "trimodal") return Family::trimodal_fixed;
    if (l == "trimodal_equidistant" || l == "equidistant") return Family::trimodal_equidistant;
    if (l == "explicit") return Family::explicit_law;
    throw ConfigError("unknown family '" + s + "'");
}

bool parse_bool(const std::string& s, const std::string& what) {
    const std::string l = lower(s);
    if (l == "1" || l == "true" || l == "yes" || l == "on") return true;
    if (l == "0" || l == "false" || l == "no" || l == "off") return false;
    throw ConfigError("invalid boolean for " + what + ": '" + s + "'");
}

json score_json(const MethodScore& s) {
    return {{"r_hat", s.r_hat},
            {"correct", s.correct},
            {"accurate", s.accurate},
            {"max_mode_error", num(s.max_mode_error)},
            {"max_prob_error", num(s.max_prob_error)},
            {"epsilon_ms", num(s.epsilon_ms)},
            {"modes", nums(s.modes)},
            {"probs", nums(s.probs)}};
}

MethodScore score_from_json(const json& j) {
    MethodScore s;
    s.r_hat = j.at("r_hat").get<int>();
    s.correct = j.at("correct").get<bool>();
    s.accurate = j.at("accurate").get<bool>();
    s.max_mode_error = get_num(j.at("max_mode_error"));
    s.max_prob_error = get_num(j.at("max_prob_error"));
    s.epsilon_ms = get_num(j.at("epsilon_ms"));
    s.modes = get_nums(j.at("modes"));
    s.probs = get_nums(j.at("probs"));
    return s;
}

json summary_json(const MethodSummary& m) {
    return {{"method", m.method},
            {"successes", m.successes},
            {"correct", m.correct},
            {"accurate", m.accurate},
            {"proportion", num(m.proportion)},
            {"proportion_accurate", num(m.proportion_accurate)},
            {"mean_epsilon_ms", num(m.mean_epsilon_ms)},
            {"mode_rmse", num(m.mode_rmse)},
            {"prob_rmse", num(m.prob_rmse)}};
}

MethodSummary summary_from_json(const json& j) {
    MethodSummary m;
    m.method = j.at("method").get<std::string>();
    m.successes = j.at("successes").get<int>();
    m.correct = j.at("correct").get<int>();
    m.accurate = j.at("accurate").get<int>();
    m.proportion = get_num(j.at("proportion"));
    m.proportion_accurate = get_num(j.at("proportion_accurate"));
    m.mean_epsilon_ms = get_num(j.at("mean_epsilon_ms"));
    m.mode_rmse = get_num(j.at("mode_rmse"));
    m.prob_rmse = get_num(j.at("prob_rmse"));
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PanelFile parse_panel_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_line(line, line_no));
    }
    if (rows.empty()) throw DataError("panel CSV is empty");
    if (rows.size() < 2) throw DataError("panel CSV has a header but no data rows");

    const auto& header = rows.front();
    const std::size_t width = header.size();
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (rows[r].size() != width)
            throw DataError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                            " fields, header has " + std::to_string(width));

    bool has_index = header[0].empty();
    if (!has_index) {
        for (std::size_t r = 1; r < rows.size() && !has_index; ++r) {
            double v;
            if (!is_missing(rows[r][0]) && !parse_number(rows[r][0], v)) has_index = true;
        }
    }
    const std::size_t first = has_index ? 1 : 0;
    if (width <= first) throw DataError("panel CSV has no series columns");

    PanelFile out;
    for (std::size_t c = first; c < width; ++c) {
        std::string name = header[c];
        if (name.empty()) name = "V" + std::to_string(c - first + 1);
        out.names.push_back(name);
    }
    const Eigen::Index p = static_cast<Eigen::Index>(width - first);
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size() - 1);
    out.panel.data.resize(p, n);
    out.panel.kind = PanelKind::observed;
    for (Eigen::Index t = 0; t < n; ++t) {
        const auto& row = rows[static_cast<std::size_t>(t) + 1];
        if (has_index) out.time_index.push_back(row[0]);
        for (Eigen::Index i = 0; i < p; ++i) {
            const std::string& cell = row[first + static_cast<std::size_t>(i)];
            const std::string where = "series '" + out.names[static_cast<std::size_t>(i)] +
                                      "' at data row " + std::to_string(t + 1);
            if (is_missing(cell)) throw DataError("missing value in " + where);
            double v;
            if (!parse_number(cell, v)) throw DataError("non-numeric value '" + cell + "' in " + where);
            if (!std::isfinite(v)) throw DataError("non-finite value in " + where);
            out.panel.data(i, t) = v;
        }
    }
    return out;
}

PanelFile read_panel_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open '" + path + "'");
    return parse_panel_csv(f);
}

void write_panel_csv(std::ostream& out, const Panel& panel, const std::vector<std::string>& names) {
    const Eigen::Index p = panel.data.rows();
    for (Eigen::Index i = 0; i < p; ++i) {
        if (i) out << ',';
        out << (static_cast<std::size_t>(i) < names.size() ? names[static_cast<std::size_t>(i)]
                                                           : "V" + std::to_string(i + 1));
    }
    out << '\n';
    for (Eigen::Index t = 0; t < panel.data.cols(); ++t) {
        for (Eigen::Index i = 0; i < p; ++i) {
            if (i) out << ',';
            out << format_double(panel.data(i, t));
        }
        out << '\n';
    }
}

Panel standardize(const Panel& panel, const std::vector<std::string>& names) {
    const Eigen::Index n = panel.data.cols();
    if (n < 3) throw DataError("standardization needs at least 3 observations per series");
    Panel out = panel;
    for (Eigen::Index i = 0; i < panel.data.rows(); ++i) {
        const Eigen::VectorXd d =
            (panel.data.row(i).segment(1, n - 1) - panel.data.row(i).segment(0, n - 1)).transpose();
        const double mean = d.mean();
        const double var = (d.array() - mean).square().sum() / static_cast<double>(d.size() - 1);
        const double sd = std::sqrt(var);
        if (!(sd > 0.0) || !std::isfinite(sd)) {
            const std::string name = static_cast<std::size_t>(i) < names.size()
                                         ? names[static_cast<std::size_t>(i)]
                                         : "#" + std::to_string(i + 1);
            throw DataError("series '" + name + "' has constant increments and cannot be standardized");
        }
        out.data.row(i) /= sd;
    }
    return out;
}

long Histogram::total() const {
    long s = 0;
    for (long c : counts) s += c;
    return s;
}

Histogram histogram(const std::vector<double>& values, int bins) {
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    if (values.empty()) throw DomainError("histogram of an empty set");
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        // First edge strictly above v, minus one; the top value falls in the last bin.
        auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
        std::size_t b = static_cast<std::size_t>(it - h.edges.begin());
        b = b == 0 ? 0 : b - 1;
        if (b >= h.counts.size()) b = h.counts.size() - 1;
        ++h.counts[b];
    }
    return h;
}

json to_json(const ClusterScheme& s) {
    json clusters = json::array();
    for (const auto& c : s.clusters) clusters.push_back(c);
    return {{"r_hat", s.r_hat},
            {"assignments", s.assignments},
            {"clusters", clusters},
            {"modes", nums(s.mode_estimates)},
            {"probs", nums(s.prob_estimates)},
            {"icsd", num(s.icsd)},
            {"epsilon", num(s.epsilon_used)}};
}

ClusterScheme scheme_from_json(const json& j) {
    ClusterScheme s;
    s.r_hat = j.at("r_hat").get<int>();
    s.assignments = j.at("assignments").get<std::vector<int>>();
    s.clusters = j.at("clusters").get<std::vector<std::vector<std::size_t>>>();
    s.mode_estimates = get_nums(j.at("modes"));
    s.prob_estimates = get_nums(j.at("probs"));
    s.icsd = get_num(j.at("icsd"));
    s.epsilon_used = get_num(j.at("epsilon"));
    return s;
}

json to_json(const EstimationResult& r) {
    json schemes = json::array();
    for (const auto& s : r.trace.schemes) schemes.push_back(s ? to_json(*s) : json(nullptr));
    json excluded = json::array();
    for (bool b : r.trace.excluded) excluded.push_back(b);
    json trace = {{"grid", nums(r.trace.grid)},
                  {"icsd", nums(r.trace.icsd_curve)},
                  {"r_hat", r.trace.r_curve},
                  {"excluded", excluded},
                  {"chosen_index", r.trace.chosen_index},
                  {"min_cluster_dropped", r.trace.min_cluster_dropped},
                  {"schemes", schemes}};
    return {{"schema", kSchema},
            {"r_hat", r.r_hat},
            {"modes", nums(r.modes)},
            {"probs", nums(r.probs)},
            {"epsilon_ms", num(r.epsilon_ms)},
            {"icsd", num(r.icsd)},
            {"M", num(r.M)},
            {"scheme", to_json(r.scheme)},
            {"trace", trace}};
}

EstimationResult result_from_json(const json& j) {
    check_schema(j);
    EstimationResult r;
    try {
        r.r_hat = j.at("r_hat").get<int>();
        r.modes = get_nums(j.at("modes"));
        r.probs = get_nums(j.at("probs"));
        r.epsilon_ms = get_num(j.at("epsilon_ms"));
        r.icsd = get_num(j.at("icsd"));
        r.M = get_num(j.at("M"));
        r.scheme = scheme_from_json(j.at("scheme"));
        const json& t = j.at("trace");
        r.trace.grid = get_nums(t.at("grid"));
        r.trace.icsd_curve = get_nums(t.at("icsd"));
        r.trace.r_curve = t.at("r_hat").get<std::vector<int>>();
        for (const auto& b : t.at("excluded")) r.trace.excluded.push_back(b.get<bool>());
        r.trace.chosen_index = t.at("chosen_index").get<std::size_t>();
        r.trace.min_cluster_dropped = t.at("min_cluster_dropped").get<bool>();
        for (const auto& s : t.at("schemes"))
            r.trace.schemes.push_back(s.is_null() ? std::nullopt
                                                  : std::optional<ClusterScheme>(scheme_from_json(s)));
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed estimation result: ") + e.what());
    }
    return r;
}

json to_json(const LogEigenSet& h) {
    json j = {{"values", nums(h.values)},
              {"scale_log", num(h.scale_log)},
              {"mode", h.mode == LogEigenMode::single_scale ? "single_scale" : "multiscale"}};
    if (h.mode == LogEigenMode::single_scale) {
        j["octave"] = h.octave;
    } else {
        j["j1"] = h.j1;
        j["j2"] = h.j2;
    }
    return j;
}

LogEigenSet log_eigen_from_json(const json& j) {
    LogEigenSet h;
    try {
        h.values = get_nums(j.at("values"));
        h.scale_log = get_num(j.at("scale_log"));
        const auto mode = j.at("mode").get<std::string>();
        if (mode == "single_scale") {
            h.mode = LogEigenMode::single_scale;
            h.octave = j.at("octave").get<int>();
        } else if (mode == "multiscale") {
            h.mode = LogEigenMode::multiscale;
            h.j1 = j.at("j1").get<int>();
            h.j2 = j.at("j2").get<int>();
        } else {
            throw DataError("unknown log-eigenvalue mode '" + mode + "'");
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed log-eigenvalue set: ") + e.what());
    }
    return h;
}

json to_json(const Histogram& h) {
    return {{"edges", nums(h.edges)}, {"counts", h.counts}};
}

Histogram histogram_from_json(const json& j) {
    Histogram h;
    try {
        h.edges = get_nums(j.at("edges"));
        h.counts = j.at("counts").get<std::vector<long>>();
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed histogram: ") + e.what());
    }
    return h;
}

json to_json(const ExperimentSpec& s) {
    json j = {{"family", family_name(s.family)},
              {"n", s.n},
              {"p", s.p},
              {"n_vanishing", s.n_vanishing},
              {"reps", s.reps},
              {"m", s.m},
              {"M", s.M ? num(*s.M) : json("auto")},
              {"min_cluster", s.min_cluster},
              {"wrmsm", s.run_wrmsm},
              {"gmm", s.run_gmm},
              {"gmm_k_max", s.gmm_k_max},
              {"fix_mixing", s.fix_mixing},
              {"seed", s.master_seed},
              {"mode_tol", num(s.mode_tol)},
              {"prob_tol", num(s.prob_tol)}};
    if (s.multiscale) {
        j["j1"] = s.multiscale->first;
        j["j2"] = s.multiscale->second;
    } else {
        j["a"] = s.a;
        j["j"] = s.j;
    }
    if (s.family == Family::explicit_law) {
        j["modes"] = nums(s.modes);
    } else {
        j["deltas"] = nums(s.deltas);
        if (s.family == Family::bimodal) j["base"] = num(s.base);
    }
    if (!s.probs.empty()) j["probs"] = nums(s.probs);
    return j;
}

json to_json(const SweepResult& r) {
    json configs = json::array();
    for (const auto& c : r.configs) {
        json methods = json::array();
        for (const auto& m : c.methods) methods.push_back(summary_json(m));
        configs.push_back({{"delta", num(c.delta)},
                           {"modes", nums(c.modes)},
                           {"probs", nums(c.probs)},
                           {"reps", c.reps},
                           {"failed", c.failed},
                           {"methods", methods}});
    }
    json records = json::array();
    for (const auto& rec : r.records) {
        json jr = {{"config", rec.config},
                   {"rep", rec.rep},
                   {"seed", rec.seed},
                   {"ok", rec.ok},
                   {"r_true", rec.r_true}};
        if (!rec.error.empty()) jr["error"] = rec.error;
        if (rec.wrmsm) jr["wrmsm"] = score_json(*rec.wrmsm);
        if (rec.gmm) jr["gmm"] = score_json(*rec.gmm);
        records.push_back(jr);
    }
    return {{"schema", kSchema}, {"configs", configs}, {"records", records}};
}

SweepResult sweep_from_json(const json& j) {
    check_schema(j);
    SweepResult r;
    try {
        for (const auto& c : j.at("configs")) {
            ConfigSummary cs;
            cs.delta = get_num(c.at("delta"));
            cs.modes = get_nums(c.at("modes"));
            cs.probs = get_nums(c.at("probs"));
            cs.reps = c.at("reps").get<int>();
            cs.failed = c.at("failed").get<int>();
            for (const auto& m : c.at("methods")) cs.methods.push_back(summary_from_json(m));
            r.configs.push_back(std::move(cs));
        }
        for (const auto& jr : j.at("records")) {
            RepRecord rec;
            rec.config = jr.at("config").get<std::size_t>();
            rec.rep = jr.at("rep").get<int>();
            rec.seed = jr.at("seed").get<std::uint64_t>();
            rec.ok = jr.at("ok").get<bool>();
            rec.r_true = jr.at("r_true").get<int>();
            if (jr.contains("error")) rec.error = jr.at("error").get<std::string>();
            if (jr.contains("wrmsm")) rec.wrmsm = score_from_json(jr.at("wrmsm"));
            if (jr.contains("gmm")) rec.gmm = score_from_json(jr.at("gmm"));
            r.records.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed sweep result: ") + e.what());
    }
    return r;
}

namespace {
constexpr const char* kSweepHeader =
    "delta,method,proportion,proportion_accurate,successes,correct,accurate,failed,"
    "mean_epsilon_ms,mode_rmse,prob_rmse,modes,probs";

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += format_double(v[i]);
    }
    return s;
}

std::vector<double> split_semicolons(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string cur;
    while (std::getline(is, cur, ';')) {
        double v;
        if (!parse_number(cur, v)) throw DataError("invalid number '" + cur + "' in sweep CSV");
        out.push_back(v);
    }
    return out;
}
}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << kSweepHeader << '\n';
    for (const auto& c : r.configs) {
        for (const auto& m : c.methods) {
            out << format_double(c.delta) << ',' << m.method << ',' << format_double(m.proportion) << ','
                << format_double(m.proportion_accurate) << ',' << m.successes << ',' << m.correct << ','
                << m.accurate << ',' << c.failed << ',' << format_double(m.mean_epsilon_ms) << ','
                << format_double(m.mode_rmse) << ',' << format_double(m.prob_rmse) << ',' << join(c.modes)
                << ',' << join(c.probs) << '\n';
        }
    }
}

std::vector<ConfigSummary> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("sweep CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSweepHeader) throw DataError("unexpected sweep CSV header");
    std::vector<ConfigSummary> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line, line_no);
        if (f.size() != 13) throw DataError("sweep CSV line " + std::to_string(line_no) + " has wrong width");
        auto num_at = [&](std::size_t k) {
            double v;
            if (!parse_number(f[k], v))
                throw DataError("invalid number '" + f[k] + "' on sweep CSV line " + std::to_string(line_no));
            return v;
        };
        const double delta = num_at(0);
        const auto modes = split_semicolons(f[11]);
        const auto probs = split_semicolons(f[12]);
        if (out.empty() || out.back().delta != delta || out.back().modes != modes) {
            ConfigSummary c;
            c.delta = delta;
            c.modes = modes;
            c.probs = probs;
            c.failed = static_cast<int>(num_at(7));
            out.push_back(std::move(c));
        }
        MethodSummary m;
        m.method = f[1];
        m.proportion = num_at(2);
        m.proportion_accurate = num_at(3);
        m.successes = static_cast<int>(num_at(4));
        m.correct = static_cast<int>(num_at(5));
        m.accurate = static_cast<int>(num_at(6));
        m.mean_epsilon_ms = num_at(8);
        m.mode_rmse = num_at(9);
        m.prob_rmse = num_at(10);
        out.back().methods.push_back(std::move(m));
    }
    for (auto& c : out) c.reps = c.methods.empty() ? 0 : c.methods.front().successes + c.failed;
    return out;
}

ExperimentSpec parse_experiment_spec(std::istream& in) {
    ExperimentSpec s;
    std::optional<int> j1, j2;
    bool has_j = false, has_a = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("spec line " + std::to_string(line_no) + ": expected key = value");
        const std::string raw_key = trim(line.substr(0, eq));
        const std::string key = lower(raw_key);
        const std::string val = trim(line.substr(eq + 1));
        if (raw_key == "M") {
            if (lower(val) == "auto") s.M.reset();
            else s.M = parse_double_field(val, "M");
        }
        else if (key == "family") s.family = parse_family(val);
        else if (key == "base") s.base = parse_double_field(val, key);
        else if (key == "deltas" || key == "delta") s.deltas = parse_list(val, key);
        else if (key == "modes") s.modes = parse_list(val, key);
        else if (key == "probs") s.probs = parse_list(val, key);
        else if (key == "n") s.n = parse_int_field(val, key);
        else if (key == "p") s.p = parse_int_field(val, key);
        else if (key == "a") { s.a = parse_int_field(val, key); has_a = true; }
        else if (key == "j") { s.j = static_cast<int>(parse_int_field(val, key)); has_j = true; }
        else if (key == "j1") j1 = static_cast<int>(parse_int_field(val, key));
        else if (key == "j2") j2 = static_cast<int>(parse_int_field(val, key));
        else if (key == "n_vanishing") s.n_vanishing = static_cast<int>(parse_int_field(val, key));
        else if (key == "reps") s.reps = static_cast<int>(parse_int_field(val, key));
        else if (key == "m") s.m = static_cast<int>(parse_int_field(val, key));
        else if (key == "min_cluster") s.min_cluster = static_cast<int>(parse_int_field(val, key));
        else if (key == "methods") {
            s.run_wrmsm = s.run_gmm = false;
            std::istringstream is(val);
            std::string item;
            while (std::getline(is, item, ',')) {
                item = lower(trim(item));
                if (item == "wrmsm") s.run_wrmsm = true;
                else if (item == "gmm") s.run_gmm = true;
                else if (!item.empty()) throw ConfigError("unknown method '" + item + "'");
            }
        }
        else if (key == "gmm_k_max") s.gmm_k_max = static_cast<int>(parse_int_field(val, key));
        else if (key == "fix_mixing") s.fix_mixing = parse_bool(val, key);
        else if (key == "seed") s.master_seed = static_cast<std::uint64_t>(parse_int_field(val, key));
        else if (key == "mode_tol") s.mode_tol = parse_double_field(val, key);
        else if (key == "prob_tol") s.prob_tol = parse_double_field(val, key);
        else if (key == "threads") s.threads = static_cast<unsigned>(parse_int_field(val, key));
        else throw ConfigError("unknown spec key '" + raw_key + "'");
    }
    if (j1.has_value() != j2.has_value()) throw ConfigError("j1 and j2 must be given together");
    if (j1) {
        if (has_j || has_a) throw ConfigError("give either (a, j) or (j1, j2), not both");
        s.multiscale = std::make_pair(*j1, *j2);
    }
    return s;
}

ExperimentSpec read_experiment_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open '" + path + "'");
    return parse_experiment_spec(f);
}

}  // namespace wrmsm
