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

#ifndef QCAT_ENTROPY_HPP
#define QCAT_ENTROPY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcat/checkpoint.hpp"
#include "qcat/config.hpp"
#include "qcat/evolution.hpp"
#include "qcat/histories.hpp"
#include "qcat/spectral.hpp"

namespace qcat {

/// How S(J) is obtained: the blocked Gram route over history words, the
/// word-length-independent channel iteration, or whichever is cheaper.
enum class Method { direct, omega, automatic, classical };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::direct:
            return "direct";
        case Method::omega:
            return "omega";
        case Method::automatic:
            return "auto";
        case Method::classical:
            return "classical";
    }
    return "unknown";
}

inline Method parse_method(const std::string &s) {
    if (s == "direct") {
        return Method::direct;
    }
    if (s == "omega") {
        return Method::omega;
    }
    if (s == "auto") {
        return Method::automatic;
    }
    if (s == "classical") {
        return Method::classical;
    }
    throw config_error("unknown method '" + s + "' (expected direct, omega or auto)");
}

struct EntropyPoint {
    std::size_t J = 0;
    /// Entropy in nats.
    double S = 0.0;
    double walltime_s = 0.0;
};

/// S(J) for J = 1..J_max of one configuration.
struct EntropySeries {
    SystemConfig config;
    Method method = Method::direct;
    std::vector<EntropyPoint> points;
    bool truncated = false;
    std::string truncation_reason;
    /// Sampler description for classical series; empty for quantum ones.
    std::string sampler;
};

/// Resource limits and execution knobs shared by every run.
struct RunOptions {
    std::size_t workers = 1;
    std::size_t max_bytes = std::size_t{3} << 30;
    /// Largest number of history words K^J the direct route may hold.
    std::size_t max_words = std::size_t{1} << 20;
    /// Zero means unlimited.
    double max_walltime_s = 0.0;
    /// Empty disables checkpoints. Only the direct route checkpoints.
    std::filesystem::path checkpoint_dir;
    /// Write a snapshot every this many word lengths (0 disables).
    std::size_t checkpoint_interval = 0;
    bool resume = false;
    /// Stop after this word length even if J_max is larger (0 = no stop); for
    /// exercising checkpoint/resume.
    std::size_t stop_after = 0;
};

/// Memory needed to go from word length J-1 to J on the direct route.
inline std::size_t direct_step_bytes(std::size_t K, std::size_t cell, std::size_t dim, std::size_t J) {
    std::size_t a = HistoryLevel::level_bytes(K, cell, J);
    std::size_t b = J > 1 ? HistoryLevel::level_bytes(K, cell, J - 1) : 0;
    std::size_t u = dense_bytes(dim, dim);
    std::size_t width = J == 1 ? 1 : checked_pow(K, J - 2);
    std::size_t g = std::min(width, cell * cell);
    std::size_t gram = dense_bytes(g, g) * 3;
    std::size_t total = a;
    for (std::size_t x : {b, u, gram}) {
        if (total > std::numeric_limits<std::size_t>::max() - x) {
            return std::numeric_limits<std::size_t>::max();
        }
        total += x;
    }
    return total;
}

inline std::size_t omega_bytes(std::size_t dim) {
    if (dim > (std::size_t{1} << 10)) {
        return std::numeric_limits<std::size_t>::max();
    }
    // Omega, the eigen-solver copy, and per-block scratch.
    return dense_bytes(dim * dim, dim * dim) * 3;
}

/// Picks the route for a whole series. The direct route's level storage grows
/// as K^J (dim/K)^2 while Omega stays at dim^4, so Omega is chosen once
/// K^{J_max - 2} exceeds dim^2 and it fits the budget.
inline Method resolve_method(Method requested, std::size_t K, std::size_t dim, std::size_t J_max,
                             const RunOptions &opts) {
    if (requested != Method::automatic) {
        return requested;
    }
    if (J_max <= 2) {
        return Method::direct;
    }
    std::size_t words = 1;
    bool exceeds = false;
    for (std::size_t j = 0; j + 2 < J_max; j++) {
        words *= K;
        if (words > dim * dim) {
            exceeds = true;
            break;
        }
    }
    if (exceeds && omega_bytes(dim) <= opts.max_bytes) {
        return Method::omega;
    }
    return Method::direct;
}

/// Checks 0 <= S <= min(J ln K, 2 ln dim) and returns S.
inline double check_entropy_bounds(double S, std::size_t J, std::size_t K, std::size_t dim) {
    double bound = std::min(static_cast<double>(J) * std::log(static_cast<double>(K)),
                            2.0 * std::log(static_cast<double>(dim)));
    if (S < -1e-8 || S > bound + 1e-8) {
        throw numeric_error(
            "S(" + std::to_string(J) + ")=" + std::to_string(S) + " outside [0, " + std::to_string(bound) + "]");
    }
    return S;
}

/// S = -tr(D ln D) for a full decoherence matrix, with its invariants checked.
inline double saf_entropy(const DecoherenceMatrix &d) {
    double tr = d.trace();
    if (std::abs(tr - 1.0) > 1e-8) {
        throw numeric_error("decoherence matrix trace " + std::to_string(tr) + " differs from 1");
    }
    auto ev = hermitian_eigenvalues(d.matrix);
    return check_entropy_bounds(von_neumann_entropy(ev), d.J, d.K, d.dim);
}

inline double spectrum_entropy(const DecoherenceSpectrum &spec, std::size_t J, std::size_t K, std::size_t dim) {
    if (std::abs(spec.trace - 1.0) > 1e-8) {
        throw numeric_error("decoherence spectrum trace " + std::to_string(spec.trace) + " differs from 1");
    }
    return check_entropy_bounds(von_neumann_entropy(spec.eigenvalues), J, K, dim);
}

namespace detail {

inline void check_monotone(const EntropySeries &series) {
    for (std::size_t i = 1; i < series.points.size(); i++) {
        if (series.points[i].S < series.points[i - 1].S - 1e-8) {
            throw numeric_error(
                "S(J) decreased from " + std::to_string(series.points[i - 1].S) + " to " +
                std::to_string(series.points[i].S) + " at J=" + std::to_string(series.points[i].J));
        }
    }
}

inline std::filesystem::path checkpoint_path(const RunOptions &opts, const SystemConfig &config) {
    return opts.checkpoint_dir / (config.hash_hex() + ".ckpt");
}

}  // namespace detail

/// S(1..J_max) for an explicit dense propagator. `config` supplies the shape,
/// K and the hash recorded in checkpoints.
inline EntropySeries entropy_series_for_unitary(const Eigen::MatrixXcd &u, const SystemConfig &config,
                                                std::size_t J_max, Method method, const RunOptions &opts = {}) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

    PartitionProjectors projectors(config.shape(), config.K);
    const std::size_t K = projectors.cells();
    const std::size_t dim = projectors.dim();
    const std::size_t cell = projectors.cell_size();

    EntropySeries series;
    series.config = config;
    series.method = resolve_method(method, K, dim, J_max, opts);
    if (series.method == Method::classical) {
        throw std::invalid_argument("the classical route has no quantum propagator");
    }
    auto truncate = [&](std::string why) {
        series.truncated = true;
        series.truncation_reason = std::move(why);
    };
    auto out_of_time = [&] { return opts.max_walltime_s > 0 && elapsed() > opts.max_walltime_s; };

    if (series.method == Method::omega) {
        if (omega_bytes(dim) > opts.max_bytes) {
            throw budget_error("omega matrix for dim=" + std::to_string(dim) + " exceeds the memory budget");
        }
        OmegaIteration it(u, projectors, opts.max_bytes);
        for (std::size_t J = 1; J <= J_max; J++) {
            it.step(opts.workers);
            double tr = it.matrix().trace().real();
            if (std::abs(tr - 1.0) > 1e-8) {
                throw numeric_error("omega trace " + std::to_string(tr) + " differs from 1");
            }
            double S = check_entropy_bounds(von_neumann_entropy(hermitian_eigenvalues(it.matrix())), J, K, dim);
            series.points.push_back({J, S, elapsed()});
            if (opts.stop_after != 0 && J >= opts.stop_after && J < J_max) {
                truncate("stopped after J=" + std::to_string(J));
                break;
            }
            if (J < J_max && out_of_time()) {
                truncate("wall-time budget exhausted after J=" + std::to_string(J));
                break;
            }
        }
        detail::check_monotone(series);
        return series;
    }

    std::optional<HistoryLevel> level;
    if (opts.resume && !opts.checkpoint_dir.empty()) {
        auto path = detail::checkpoint_path(opts, config);
        if (std::filesystem::exists(path)) {
            Checkpoint ckpt = read_checkpoint(path);
            if (ckpt.config_hash != config.hash() || ckpt.level.cells() != K || ckpt.level.cell_size() != cell ||
                ckpt.level.dim() != dim || ckpt.entropies.size() != ckpt.level.length()) {
                throw config_error("checkpoint " + path.string() + " does not belong to this configuration");
            }
            for (std::size_t j = 0; j < ckpt.entropies.size() && j < J_max; j++) {
                series.points.push_back({j + 1, ckpt.entropies[j], 0.0});
            }
            if (ckpt.level.length() < J_max) {
                level = std::move(ckpt.level);
            } else {
                detail::check_monotone(series);
                return series;
            }
        }
    }

    for (std::size_t J = level ? level->length() + 1 : 1; J <= J_max; J++) {
        if (checked_pow(K, J) > opts.max_words || direct_step_bytes(K, cell, dim, J) > opts.max_bytes) {
            if (J == 1) {
                throw budget_error("word length 1 already exceeds the memory budget");
            }
            truncate("memory budget reached before J=" + std::to_string(J));
            break;
        }
        if (!level) {
            level = HistoryLevel::root(projectors);
        } else {
            level = level->expand(u, opts.workers);
        }
        double S = spectrum_entropy(decoherence_spectrum(*level, opts.workers), J, K, dim);
        series.points.push_back({J, S, elapsed()});

        bool last = J == J_max;
        bool stopping = opts.stop_after != 0 && J >= opts.stop_after && !last;
        bool timed_out = !last && out_of_time();
        if (!opts.checkpoint_dir.empty() && opts.checkpoint_interval != 0 &&
            (J % opts.checkpoint_interval == 0 || stopping || timed_out)) {
            Checkpoint ckpt;
            ckpt.config_hash = config.hash();
            for (const auto &p : series.points) {
                ckpt.entropies.push_back(p.S);
            }
            ckpt.level = *level;
            std::filesystem::create_directories(opts.checkpoint_dir);
            write_checkpoint(detail::checkpoint_path(opts, config), ckpt);
        }
        if (stopping) {
            truncate("stopped after J=" + std::to_string(J));
            break;
        }
        if (timed_out) {
            truncate("wall-time budget exhausted after J=" + std::to_string(J));
            break;
        }
    }
    detail::check_monotone(series);
    return series;
}

/// S(1..J_max) of a configuration: builds and materializes its period propagator first.
inline EntropySeries entropy_series(SystemConfig config, std::size_t J_max, Method method,
                                    const RunOptions &opts = {}) {
    config.validate();
    DenseUnitary u = period_unitary(config, opts.workers, opts.max_bytes);
    double residual = u.max_column_overlap_error();
    if (residual > 1e-10) {
        throw numeric_error("period propagator is not unitary (residual " + std::to_string(residual) + ")");
    }
    return entropy_series_for_unitary(u.matrix, config, J_max, method, opts);
}

}  // namespace qcat

#endif
