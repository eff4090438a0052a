// Copyright 2026 The qcat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment plans read from JSON, the sweeps that reproduce the entropy
// curves, and their CSV / gnuplot / metadata outputs.

#ifndef QCAT_EXPERIMENTS_HPP
#define QCAT_EXPERIMENTS_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcat/classical.hpp"
#include "qcat/config.hpp"
#include "qcat/entropy.hpp"

namespace qcat {

enum class ExperimentKind { single_cat, multi_cat, classical, sweep_V, sweep_I };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::single_cat:
            return "single_cat";
        case ExperimentKind::multi_cat:
            return "multi_cat";
        case ExperimentKind::classical:
            return "classical";
        case ExperimentKind::sweep_V:
            return "sweep_V";
        case ExperimentKind::sweep_I:
            return "sweep_I";
    }
    return "unknown";
}

inline ExperimentKind parse_kind(const std::string &s) {
    for (auto k : {ExperimentKind::single_cat, ExperimentKind::multi_cat, ExperimentKind::classical,
                   ExperimentKind::sweep_V, ExperimentKind::sweep_I}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw config_error("kind: unknown experiment kind '" + s + "'");
}

struct Budget {
    std::size_t max_dim = std::size_t{1} << 12;
    std::size_t max_words = std::size_t{1} << 20;
    std::size_t max_bytes = std::size_t{3} << 30;
    double max_walltime_s = 0.0;
};

/// One quantum run of a plan. `role` tags sweep members and comparison baselines.
struct PlannedRun {
    SystemConfig config;
    std::size_t J_max = 6;
    std::string role;
};

struct ExperimentPlan {
    ExperimentKind kind = ExperimentKind::single_cat;
    std::vector<PlannedRun> runs;
    std::filesystem::path out_dir = ".";
    Budget budget;
    std::size_t checkpoint_interval = 0;
    Method method = Method::automatic;
    bool heavy = false;
    /// Classical reference curve (single and classical runs).
    bool classical_reference = false;
    std::size_t classical_J_max = 6;
    Sampler sampler = GridSampler{4096};
    /// Sweep-V diagnostic word length and the V grid (recorded in the metadata).
    std::size_t diagnostic_J = 4;
    std::vector<double> V_grid;
};

struct ResultRecord {
    std::string config_hash;
    std::size_t N = 0;
    std::size_t n = 0;
    std::size_t I = 0;
    double V = 0.0;
    std::size_t R = 0;
    std::size_t J = 0;
    double S_nats = 0.0;
    std::string method;
    double walltime_s = 0.0;
    std::size_t workers = 1;

    bool operator==(const ResultRecord &) const = default;
};

namespace detail {

inline const std::set<std::string> &known_keys() {
    static const std::set<std::string> keys = {
        "kind",    "N",       "n",      "I",          "shifts",   "V",      "R",
        "K",       "J_max",   "N_list", "V_list",     "I_list",   "method", "sampler",
        "grid_size", "mc_samples", "seed", "budget", "checkpoint_interval", "diagnostic_J"};
    return keys;
}

template <typename T>
T get_unsigned(const nlohmann::json &j, const std::string &key) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw config_error(key + ": expected a non-negative integer");
    }
    return j.get<T>();
}

inline double get_real(const nlohmann::json &j, const std::string &key) {
    if (!j.is_number()) {
        throw config_error(key + ": expected a number");
    }
    double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw config_error(key + ": expected a finite number");
    }
    return v;
}

inline std::size_t feasible_J(const SystemConfig &c, const Budget &budget, Method method, std::size_t want) {
    RunOptions opts;
    opts.max_bytes = budget.max_bytes;
    std::size_t dim = c.shape().total();
    Method m = resolve_method(method, c.K, dim, want, opts);
    if (m == Method::omega) {
        return omega_bytes(dim) <= budget.max_bytes ? want : 0;
    }
    std::size_t cell = dim / c.K;
    std::size_t J = 0;
    while (J < want) {
        std::size_t next = J + 1;
        std::size_t words = 1;
        bool overflow = false;
        for (std::size_t i = 0; i < next; i++) {
            if (words > budget.max_words / c.K) {
                overflow = true;
                break;
            }
            words *= c.K;
        }
        if (overflow || direct_step_bytes(c.K, cell, dim, next) > budget.max_bytes) {
            break;
        }
        J = next;
    }
    return J;
}

}  // namespace detail

/// Log-spaced default V grid: 0 and 2^-2 .. 2^5 in octaves.
inline std::vector<double> default_V_grid() {
    std::vector<double> v = {0.0};
    for (int e = -2; e <= 5; e++) {
        v.push_back(std::ldexp(1.0, e));
    }
    return v;
}

/// Builds a validated plan from a JSON document. `kind` comes from the CLI
/// subcommand; a "kind" key in the document must agree with it.
inline ExperimentPlan parse_config(const nlohmann::json &doc, ExperimentKind kind, bool heavy = false) {
    if (!doc.is_object()) {
        throw config_error("config: expected a JSON object");
    }
    for (const auto &[key, _] : doc.items()) {
        if (!detail::known_keys().count(key)) {
            throw config_error(key + ": unknown key");
        }
    }
    if (doc.contains("kind") && parse_kind(doc.at("kind").get<std::string>()) != kind) {
        throw config_error("kind: '" + doc.at("kind").get<std::string>() + "' does not match the subcommand '" +
                           to_string(kind) + "'");
    }

    ExperimentPlan plan;
    plan.kind = kind;
    plan.heavy = heavy;

    if (doc.contains("budget")) {
        const auto &b = doc.at("budget");
        if (!b.is_object()) {
            throw config_error("budget: expected an object");
        }
        for (const auto &[key, val] : b.items()) {
            if (key == "max_dim") {
                plan.budget.max_dim = detail::get_unsigned<std::size_t>(val, "budget.max_dim");
            } else if (key == "max_words") {
                plan.budget.max_words = detail::get_unsigned<std::size_t>(val, "budget.max_words");
            } else if (key == "max_bytes") {
                plan.budget.max_bytes = detail::get_unsigned<std::size_t>(val, "budget.max_bytes");
            } else if (key == "max_walltime_s") {
                plan.budget.max_walltime_s = detail::get_real(val, "budget.max_walltime_s");
            } else {
                throw config_error("budget." + key + ": unknown key");
            }
        }
    }
    if (doc.contains("method")) {
        if (!doc.at("method").is_string()) {
            throw config_error("method: expected a string");
        }
        plan.method = parse_method(doc.at("method").get<std::string>());
        if (plan.method == Method::classical) {
            throw config_error("method: 'classical' is not a quantum method");
        }
    }
    if (doc.contains("checkpoint_interval")) {
        plan.checkpoint_interval = detail::get_unsigned<std::size_t>(doc.at("checkpoint_interval"),
                                                                     "checkpoint_interval");
    }
    std::uint64_t seed = 0;
    if (doc.contains("seed")) {
        seed = detail::get_unsigned<std::uint64_t>(doc.at("seed"), "seed");
    }
    std::string sampler = doc.value("sampler", std::string("grid"));
    if (sampler == "grid") {
        std::size_t G = doc.contains("grid_size") ? detail::get_unsigned<std::size_t>(doc.at("grid_size"), "grid_size")
                                                  : 4096;
        if (G == 0) {
            throw config_error("grid_size: must be positive");
        }
        plan.sampler = GridSampler{G};
    } else if (sampler == "mc") {
        std::uint64_t samples = doc.contains("mc_samples")
                                    ? detail::get_unsigned<std::uint64_t>(doc.at("mc_samples"), "mc_samples")
                                    : (std::uint64_t{1} << 22);
        plan.sampler = MonteCarloSampler{samples, seed};
    } else {
        throw config_error("sampler: expected 'grid' or 'mc'");
    }
    if (doc.contains("diagnostic_J")) {
        plan.diagnostic_J = detail::get_unsigned<std::size_t>(doc.at("diagnostic_J"), "diagnostic_J");
    }

    SystemConfig base;
    base.max_dim = plan.budget.max_dim;
    if (doc.contains("N")) {
        base.N = detail::get_unsigned<std::size_t>(doc.at("N"), "N");
    }
    if (doc.contains("n")) {
        base.n = detail::get_unsigned<std::size_t>(doc.at("n"), "n");
    }
    if (doc.contains("I")) {
        base.I = detail::get_unsigned<std::size_t>(doc.at("I"), "I");
    }
    if (doc.contains("V")) {
        base.V = detail::get_real(doc.at("V"), "V");
    }
    if (doc.contains("R")) {
        base.R = detail::get_unsigned<std::size_t>(doc.at("R"), "R");
    }
    if (doc.contains("K")) {
        base.K = detail::get_unsigned<std::size_t>(doc.at("K"), "K");
    }
    if (doc.contains("shifts")) {
        if (!doc.at("shifts").is_array()) {
            throw config_error("shifts: expected an array of integers");
        }
        for (const auto &s : doc.at("shifts")) {
            base.shifts.push_back(detail::get_unsigned<std::size_t>(s, "shifts"));
        }
    }
    bool explicit_J = doc.contains("J_max");
    std::size_t J_request = explicit_J ? detail::get_unsigned<std::size_t>(doc.at("J_max"), "J_max") : 6;
    if (J_request < 1) {
        throw config_error("J_max: must be >= 1");
    }
    base.J_max = J_request;

    auto list_of = [&](const char *key, auto convert) {
        using T = decltype(convert(nlohmann::json{}));
        std::vector<T> out;
        if (!doc.contains(key)) {
            return out;
        }
        if (!doc.at(key).is_array() || doc.at(key).empty()) {
            throw config_error(std::string(key) + ": expected a non-empty array");
        }
        for (const auto &v : doc.at(key)) {
            out.push_back(convert(v));
        }
        return out;
    };
    auto as_size = [](const nlohmann::json &v) { return detail::get_unsigned<std::size_t>(v, "list entry"); };
    auto as_real = [](const nlohmann::json &v) { return detail::get_real(v, "list entry"); };

    auto add = [&](SystemConfig c, std::string role) {
        if (!doc.contains("shifts") || c.I != base.I) {
            c.shifts.clear();
        }
        c.validate();
        std::size_t J = J_request;
        if (!explicit_J) {
            // Default J_max is capped by the budget rather than truncated at run time.
            J = std::max<std::size_t>(1, detail::feasible_J(c, plan.budget, plan.method, J_request));
        }
        if (detail::feasible_J(c, plan.budget, plan.method, 1) < 1) {
            throw budget_error("configuration " + role + " does not fit the memory budget even at J=1");
        }
        c.J_max = J;
        plan.runs.push_back({c, J, std::move(role)});
    };

    switch (kind) {
        case ExperimentKind::single_cat: {
            auto Ns = list_of("N_list", as_size);
            if (Ns.empty()) {
                if (doc.contains("N")) {
                    Ns = {base.N};
                } else {
                    Ns = {16, 32, 64};
                    if (heavy) {
                        Ns.push_back(128);
                        Ns.push_back(256);
                    }
                }
            }
            for (auto N : Ns) {
                SystemConfig c = base;
                c.N = N;
                c.I = 0;
                c.V = 0.0;
                add(c, "N=" + std::to_string(N));
            }
            plan.classical_reference = true;
            plan.classical_J_max = J_request;
            break;
        }
        case ExperimentKind::multi_cat:
            add(base, "multi");
            break;
        case ExperimentKind::classical:
            plan.classical_reference = true;
            plan.classical_J_max = J_request;
            break;
        case ExperimentKind::sweep_V: {
            auto Vs = list_of("V_list", as_real);
            if (Vs.empty()) {
                Vs = default_V_grid();
            }
            if (!doc.contains("I")) {
                base.I = heavy ? 3 : 2;
            }
            plan.V_grid = Vs;
            for (double V : Vs) {
                SystemConfig c = base;
                c.V = V;
                char buf[64];
                auto res = std::to_chars(buf, buf + sizeof(buf), V);
                add(c, "V=" + std::string(buf, res.ptr));
            }
            break;
        }
        case ExperimentKind::sweep_I: {
            auto Is = list_of("I_list", as_size);
            if (Is.empty()) {
                Is = {1, 2, 3};
            }
            if (!doc.contains("V")) {
                base.V = 8.0;
            }
            for (auto I : Is) {
                SystemConfig c = base;
                c.I = I;
                add(c, "I=" + std::to_string(I));
            }
            SystemConfig free = base;
            free.I = 0;
            free.V = 0.0;
            add(free, "baseline V=0 N=" + std::to_string(base.N));
            if (heavy) {
                SystemConfig big = free;
                big.N = 256;
                add(big, "baseline V=0 N=256");
            }
            break;
        }
    }
    return plan;
}

inline ExperimentPlan parse_config_file(const std::filesystem::path &path, ExperimentKind kind, bool heavy = false) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("config: cannot open " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw config_error(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(doc, kind, heavy);
}

/// Records of one series, one per word length.
inline std::vector<ResultRecord> to_records(const EntropySeries &series, std::size_t workers) {
    std::vector<ResultRecord> out;
    for (const auto &p : series.points) {
        ResultRecord r;
        r.config_hash = series.sampler.empty()
                            ? series.config.hash_hex()
                            : hex64(fnv1a(series.sampler + ";K=" + std::to_string(series.config.K)));
        r.N = series.config.N;
        r.n = series.method == Method::classical ? 0 : series.config.n;
        r.I = series.config.I;
        r.V = series.config.V;
        r.R = series.config.R;
        r.J = p.J;
        r.S_nats = p.S;
        r.method = to_string(series.method);
        r.walltime_s = p.walltime_s;
        r.workers = workers;
        out.push_back(r);
    }
    return out;
}

/// Everything a run produced: CSV rows, truncation markers and named diagnostics.
struct ExperimentResult {
    std::vector<ResultRecord> records;
    std::vector<std::string> truncations;
    std::map<std::string, double> diagnostics;
    std::map<std::string, bool> checks;
};

namespace detail {

inline RunOptions run_options(const ExperimentPlan &plan, std::size_t workers, bool resume) {
    RunOptions o;
    o.workers = workers;
    o.max_bytes = plan.budget.max_bytes;
    o.max_words = plan.budget.max_words;
    o.max_walltime_s = plan.budget.max_walltime_s;
    o.checkpoint_interval = plan.checkpoint_interval;
    if (plan.checkpoint_interval != 0) {
        o.checkpoint_dir = plan.out_dir / "checkpoints";
    }
    o.resume = resume;
    return o;
}

inline std::vector<EntropySeries> run_all(const ExperimentPlan &plan, std::size_t workers, bool resume,
                                          ExperimentResult &result) {
    std::vector<EntropySeries> all;
    for (const auto &run : plan.runs) {
        auto series = entropy_series(run.config, run.J_max, plan.method, run_options(plan, workers, resume));
        if (series.truncated) {
            result.truncations.push_back(run.role + ": " + series.truncation_reason);
        }
        auto recs = to_records(series, workers);
        result.records.insert(result.records.end(), recs.begin(), recs.end());
        all.push_back(std::move(series));
    }
    return all;
}

inline double value_at(const EntropySeries &s, std::size_t J) {
    for (const auto &p : s.points) {
        if (p.J == J) {
            return p.S;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// (max - min) / mean of S over the grid points with V in [lo, hi].
inline double relative_variation(const std::vector<std::pair<double, double>> &vs, double lo, double hi) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    double sum = 0.0;
    std::size_t count = 0;
    for (auto [V, S] : vs) {
        if (V >= lo && V <= hi && std::isfinite(S)) {
            mn = std::min(mn, S);
            mx = std::max(mx, S);
            sum += S;
            count++;
        }
    }
    if (count < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return (mx - mn) / (sum / static_cast<double>(count));
}

}  // namespace detail

/// Single-particle S(J) for every N of the plan, plus the
/// classical reference curve. Checks the 2 ln N ceiling on every row.
inline ExperimentResult run_single(const ExperimentPlan &plan, std::size_t workers = 1, bool resume = false) {
    ExperimentResult result;
    auto all = detail::run_all(plan, workers, resume, result);
    bool ceiling = true;
    for (const auto &s : all) {
        double bound = 2.0 * std::log(static_cast<double>(s.config.N));
        for (const auto &p : s.points) {
            ceiling = ceiling && p.S <= bound + 1e-8;
        }
    }
    result.checks["ceiling_2lnN"] = ceiling;
    if (plan.classical_reference) {
        auto cl = classical_entropy_series(plan.classical_J_max, plan.runs.empty() ? 4 : plan.runs.front().config.K,
                                           plan.sampler, workers);
        auto recs = to_records(cl, workers);
        result.records.insert(result.records.end(), recs.begin(), recs.end());
    }
    result.diagnostics["ks_entropy"] = ks_entropy();
    return result;
}

inline ExperimentResult run_multi(const ExperimentPlan &plan, std::size_t workers = 1, bool resume = false) {
    ExperimentResult result;
    auto all = detail::run_all(plan, workers, resume, result);
    bool ceiling = true;
    for (const auto &s : all) {
        double bound = 2.0 * std::log(static_cast<double>(s.config.shape().total()));
        for (const auto &p : s.points) {
            ceiling = ceiling && p.S <= bound + 1e-8;
        }
    }
    result.checks["ceiling_2lnDim"] = ceiling;
    return result;
}

inline ExperimentResult run_classical(const ExperimentPlan &plan, std::size_t workers = 1) {
    ExperimentResult result;
    auto cl = classical_entropy_series(plan.classical_J_max, 4, plan.sampler, workers);
    result.records = to_records(cl, workers);
    for (std::size_t i = 1; i < cl.points.size(); i++) {
        result.diagnostics["increment_J" + std::to_string(cl.points[i].J)] = cl.points[i].S - cl.points[i - 1].S;
    }
    result.diagnostics["ks_entropy"] = ks_entropy();
    return result;
}

/// S(J, V) over the plan's V grid. The plateau diagnostic is the
/// relative variation of S(diagnostic_J, V) over V in [4, 32] divided by that
/// over V in [0, 4]; values below 1 indicate a plateau in the upper range.
inline ExperimentResult run_sweep_V(const ExperimentPlan &plan, std::size_t workers = 1, bool resume = false) {
    ExperimentResult result;
    auto all = detail::run_all(plan, workers, resume, result);
    std::vector<std::pair<double, double>> vs;
    bool complete = true;
    for (const auto &s : all) {
        complete = complete && !s.truncated && s.points.size() == s.config.J_max;
        vs.emplace_back(s.config.V, detail::value_at(s, plan.diagnostic_J));
    }
    double lower = detail::relative_variation(vs, 0.0, 4.0);
    double upper = detail::relative_variation(vs, 4.0, 32.0);
    result.diagnostics["variation_V_0_4"] = lower;
    result.diagnostics["variation_V_4_32"] = upper;
    result.diagnostics["plateau_diagnostic"] = upper / lower;
    result.checks["plateau"] = upper / lower < 1.0;
    result.checks["grid_complete"] = complete;
    return result;
}

/// S(J) for each I at fixed V, with V = 0 baselines. Checks that
/// S grows with I for J >= 4 (slack 1e-6) and that I = 1 beats the saturated
/// V = 0 curve for J >= 5.
inline ExperimentResult run_sweep_I(const ExperimentPlan &plan, std::size_t workers = 1, bool resume = false) {
    ExperimentResult result;
    auto all = detail::run_all(plan, workers, resume, result);
    std::vector<const EntropySeries *> coupled;
    const EntropySeries *baseline = nullptr;
    for (std::size_t i = 0; i < all.size(); i++) {
        if (plan.runs[i].role.rfind("I=", 0) == 0) {
            coupled.push_back(&all[i]);
        } else if (!baseline) {
            baseline = &all[i];
        }
    }
    std::sort(coupled.begin(), coupled.end(),
              [](const EntropySeries *a, const EntropySeries *b) { return a->config.I < b->config.I; });
    bool ordered = true;
    bool ceiling = true;
    for (const auto *s : coupled) {
        double bound = 2.0 * std::log(static_cast<double>(s->config.shape().total()));
        for (const auto &p : s->points) {
            ceiling = ceiling && p.S <= bound + 1e-8;
        }
    }
    for (std::size_t i = 1; i < coupled.size(); i++) {
        for (const auto &p : coupled[i]->points) {
            if (p.J < 4) {
                continue;
            }
            double prev = detail::value_at(*coupled[i - 1], p.J);
            if (std::isfinite(prev) && p.S < prev - 1e-6) {
                ordered = false;
            }
        }
    }
    result.checks["nondecreasing_in_I"] = ordered;
    result.checks["ceiling_2lnDim"] = ceiling;
    if (baseline && !coupled.empty() && coupled.front()->config.I == 1) {
        bool beats = true;
        for (const auto &p : coupled.front()->points) {
            if (p.J < 5) {
                continue;
            }
            double b = detail::value_at(*baseline, p.J);
            if (std::isfinite(b)) {
                beats = beats && p.S > b;
                result.diagnostics["I1_minus_V0_J" + std::to_string(p.J)] = p.S - b;
            }
        }
        result.checks["I1_exceeds_V0"] = beats;
    }
    return result;
}

inline ExperimentResult run_plan(const ExperimentPlan &plan, std::size_t workers = 1, bool resume = false) {
    switch (plan.kind) {
        case ExperimentKind::single_cat:
            return run_single(plan, workers, resume);
        case ExperimentKind::multi_cat:
            return run_multi(plan, workers, resume);
        case ExperimentKind::classical:
            return run_classical(plan, workers);
        case ExperimentKind::sweep_V:
            return run_sweep_V(plan, workers, resume);
        case ExperimentKind::sweep_I:
            return run_sweep_I(plan, workers, resume);
    }
    return {};
}

// ---------------------------------------------------------------------------
// Output files

inline constexpr const char *kCsvHeader = "config_hash,N,n,I,V,R,J,S_nats,method,walltime_s";

struct CsvOptions {
    /// Write measured wall times; when false the column holds 0 so reruns are bit-identical.
    bool timing = false;
    /// Append an S_bits column.
    bool bits = false;
};

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string to_csv(const std::vector<ResultRecord> &records, const CsvOptions &opts = {}) {
    std::string out = kCsvHeader;
    if (opts.bits) {
        out += ",S_bits";
    }
    out += "\n";
    for (const auto &r : records) {
        out += r.config_hash + "," + std::to_string(r.N) + "," + std::to_string(r.n) + "," + std::to_string(r.I) +
               "," + format_double(r.V) + "," + std::to_string(r.R) + "," + std::to_string(r.J) + "," +
               format_double(r.S_nats) + "," + r.method + "," + format_double(opts.timing ? r.walltime_s : 0.0);
        if (opts.bits) {
            out += "," + format_double(r.S_nats / std::log(2.0));
        }
        out += "\n";
    }
    return out;
}

inline void emit_csv(const std::vector<ResultRecord> &records, const std::filesystem::path &path,
                     const CsvOptions &opts = {}) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << to_csv(records, opts);
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

inline std::vector<ResultRecord> parse_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind(kCsvHeader, 0) != 0) {
        throw std::runtime_error("CSV header mismatch");
    }
    auto parse_size = [](const std::string &s) {
        std::size_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            throw std::runtime_error("bad integer field '" + s + "'");
        }
        return v;
    };
    auto parse_real = [](const std::string &s) {
        double v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            throw std::runtime_error("bad real field '" + s + "'");
        }
        return v;
    };
    std::vector<ResultRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() < 10) {
            throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields");
        }
        ResultRecord r;
        r.config_hash = f[0];
        r.N = parse_size(f[1]);
        r.n = parse_size(f[2]);
        r.I = parse_size(f[3]);
        r.V = parse_real(f[4]);
        r.R = parse_size(f[5]);
        r.J = parse_size(f[6]);
        r.S_nats = parse_real(f[7]);
        r.method = f[8];
        r.walltime_s = parse_real(f[9]);
        out.push_back(r);
    }
    return out;
}

inline std::vector<ResultRecord> read_csv(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

/// Gnuplot script plotting S(J) against J for every config in the CSV, with
/// the 2 ln(dim) ceilings and, for single-particle runs, a line of KS slope.
inline std::string plot_script(const std::vector<ResultRecord> &records, ExperimentKind kind,
                               const std::string &csv_name) {
    std::ostringstream g;
    g << "# gnuplot script for " << to_string(kind) << " entropies; run: gnuplot -p <this file>\n";
    g << "set datafile separator ','\n";
    g << "set key top left\n";
    g << "set xlabel 'J'\n";
    g << "set ylabel 'S(J) [nats]'\n";
    g << "set title 'S(J) vs J (" << to_string(kind) << ")'\n";
    std::vector<std::string> order;
    std::map<std::string, ResultRecord> first;
    for (const auto &r : records) {
        if (!first.count(r.config_hash)) {
            order.push_back(r.config_hash);
            first[r.config_hash] = r;
        }
    }
    std::vector<std::string> items;
    std::set<std::size_t> ceilings;
    for (const auto &h : order) {
        const auto &r = first[h];
        std::string title;
        if (r.method == "classical") {
            title = "classical";
        } else {
            title = "N=" + std::to_string(r.N);
            if (r.I > 0) {
                title += " n=" + std::to_string(r.n) + " I=" + std::to_string(r.I) + " V=" + format_double(r.V);
            }
            std::size_t dim = r.N;
            for (std::size_t i = 0; i < r.I; i++) {
                dim *= r.n;
            }
            ceilings.insert(dim);
        }
        items.push_back("'" + csv_name + "' using 7:(strcol(1) eq '" + h + "' ? $8 : 1/0) with linespoints title '" +
                        title + "'");
    }
    for (auto dim : ceilings) {
        items.push_back("2*log(" + std::to_string(dim) + ") with lines dashtype 2 title '2 ln " + std::to_string(dim) +
                        "'");
    }
    if (kind == ExperimentKind::single_cat || kind == ExperimentKind::classical) {
        items.push_back("log(4) + " + format_double(ks_entropy()) + "*(x-1) with lines title 'KS slope'");
    }
    g << "plot [1:] ";
    for (std::size_t i = 0; i < items.size(); i++) {
        g << (i ? ", \\\n     " : "") << items[i];
    }
    g << "\n";
    return g.str();
}

inline void emit_plot_script(const std::vector<ResultRecord> &records, ExperimentKind kind,
                             const std::filesystem::path &csv_path, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << plot_script(records, kind, csv_path.filename().string());
}

/// Run metadata: plan snapshot, diagnostics, truncation markers and timing.
inline nlohmann::json run_metadata(const ExperimentPlan &plan, const ExperimentResult &result, std::size_t workers,
                                   double walltime_s) {
    nlohmann::json meta;
    meta["kind"] = to_string(plan.kind);
    meta["method"] = to_string(plan.method);
    meta["heavy"] = plan.heavy;
    meta["workers"] = workers;
    meta["walltime_s"] = walltime_s;
    meta["units"] = "nats";
    nlohmann::json runs = nlohmann::json::array();
    for (const auto &r : plan.runs) {
        runs.push_back({{"role", r.role},
                        {"config_hash", r.config.hash_hex()},
                        {"N", r.config.N},
                        {"n", r.config.n},
                        {"I", r.config.I},
                        {"shifts", r.config.shifts},
                        {"V", r.config.V},
                        {"R", r.config.R},
                        {"K", r.config.K},
                        {"J_max", r.J_max}});
    }
    meta["runs"] = runs;
    if (!plan.V_grid.empty()) {
        meta["V_grid"] = plan.V_grid;
        meta["V_grid_note"] = "log-spaced octaves 2^-2..2^5 plus V=0 unless overridden by V_list";
    }
    if (plan.classical_reference || plan.kind == ExperimentKind::classical) {
        if (const auto *g = std::get_if<GridSampler>(&plan.sampler)) {
            meta["sampler"] = {{"kind", "grid"}, {"G", g->G}};
        } else {
            const auto &mc = std::get<MonteCarloSampler>(plan.sampler);
            meta["sampler"] = {{"kind", "mc"}, {"samples", mc.samples}, {"seed", mc.seed}};
        }
    }
    meta["truncated"] = !result.truncations.empty();
    meta["truncations"] = result.truncations;
    nlohmann::json diag = nlohmann::json::object();
    for (const auto &[k, v] : result.diagnostics) {
        diag[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    }
    meta["diagnostics"] = diag;
    meta["checks"] = result.checks;
    return meta;
}

}  // namespace qcat

#endif
