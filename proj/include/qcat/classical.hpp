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

// Classical Arnol'd cat map (Q, P) -> (Q + P, Q + 2P) mod 1 and the Shannon
// entropies of its symbolic dynamics on K vertical strips.

#ifndef QCAT_CLASSICAL_HPP
#define QCAT_CLASSICAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "qcat/config.hpp"
#include "qcat/entropy.hpp"
#include "qcat/parallel.hpp"

namespace qcat {

struct PhasePoint {
    double Q = 0.0;
    /// Momentum rescaled by T/M, periodic with period 1.
    double Ptilde = 0.0;
};

inline double wrap_unit(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

inline PhasePoint cat_step(PhasePoint pt) {
    return {wrap_unit(pt.Q + pt.Ptilde), wrap_unit(pt.Q + 2.0 * pt.Ptilde)};
}

/// ln((3 + sqrt 5) / 2), the KS entropy of the cat map.
inline double ks_entropy() {
    return std::log((3.0 + std::sqrt(5.0)) / 2.0);
}

/// Deterministic G x G lattice {(a/G, b/G)}; the cat map is evaluated exactly in
/// integer arithmetic on it.
struct GridSampler {
    std::size_t G = 4096;
};

/// Uniform random phase points from a 64-bit seed.
struct MonteCarloSampler {
    std::uint64_t samples = 1u << 22;
    std::uint64_t seed = 0;
};

using Sampler = std::variant<GridSampler, MonteCarloSampler>;

/// Empirical cylinder measures mu(s) for every word s of length J, indexed by
/// HistoryWord::index (s_0 most significant). The symbol at step j is read
/// before the j-th application of the map.
struct CylinderTable {
    std::size_t J = 0;
    std::size_t K = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    std::string sampler;

    double measure(std::size_t word) const {
        return static_cast<double>(counts.at(word)) / static_cast<double>(total);
    }
    std::vector<double> measures() const {
        std::vector<double> m(counts.size());
        for (std::size_t i = 0; i < counts.size(); i++) {
            m[i] = measure(i);
        }
        return m;
    }
    /// Aggregates over the last symbol: the table of word length J-1.
    CylinderTable shortened() const {
        CylinderTable t;
        t.J = J - 1;
        t.K = K;
        t.total = total;
        t.sampler = sampler;
        t.counts.assign(counts.size() / K, 0);
        for (std::size_t i = 0; i < counts.size(); i++) {
            t.counts[i / K] += counts[i];
        }
        return t;
    }
    /// -sum mu ln mu in nats.
    double shannon_entropy() const {
        double s = 0.0;
        for (auto c : counts) {
            if (c != 0) {
                double mu = static_cast<double>(c) / static_cast<double>(total);
                s -= mu * std::log(mu);
            }
        }
        return s;
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Fixed block count, so the work split never depends on the worker count.
inline constexpr std::size_t kSampleBlocks = 64;

}  // namespace detail

inline CylinderTable cylinder_measures(std::size_t J, std::size_t K, const Sampler &sampler,
                                       std::size_t workers = 1) {
    if (J < 1 || K < 1) {
        throw config_error("cylinder measures need J >= 1 and K >= 1");
    }
    const std::size_t words = checked_pow(K, J);
    if (words > (std::size_t{1} << 22)) {
        throw budget_error("cylinder table with K^J=" + std::to_string(words) + " entries exceeds the table budget");
    }
    // One accumulator per worker; integer counts make the merged table
    // independent of how blocks are shared out.
    workers = std::max<std::size_t>(1, std::min(workers, detail::kSampleBlocks));
    std::vector<std::vector<std::uint64_t>> partial(workers);
    CylinderTable table;
    table.J = J;
    table.K = K;

    std::function<void(std::size_t, std::vector<std::uint64_t> &)> run_block;
    if (const auto *grid = std::get_if<GridSampler>(&sampler)) {
        const std::size_t G = grid->G;
        if (G == 0) {
            throw config_error("grid size must be positive");
        }
        table.sampler = "grid:" + std::to_string(G);
        table.total = static_cast<std::uint64_t>(G) * G;
        run_block = [G, J, K](std::size_t blk, std::vector<std::uint64_t> &counts) {
            std::size_t lo = G * blk / detail::kSampleBlocks;
            std::size_t hi = G * (blk + 1) / detail::kSampleBlocks;
            for (std::size_t a0 = lo; a0 < hi; a0++) {
                for (std::size_t b0 = 0; b0 < G; b0++) {
                    std::size_t a = a0;
                    std::size_t b = b0;
                    std::size_t code = 0;
                    for (std::size_t j = 0; j < J; j++) {
                        code = code * K + (K * a) / G;
                        std::size_t na = (a + b) % G;
                        std::size_t nb = (a + 2 * b) % G;
                        a = na;
                        b = nb;
                    }
                    counts[code]++;
                }
            }
        };
    } else {
        const auto mc = std::get<MonteCarloSampler>(sampler);
        table.sampler = "mc:" + std::to_string(mc.samples) + ":seed=" + std::to_string(mc.seed);
        table.total = mc.samples;
        run_block = [mc, J, K](std::size_t blk, std::vector<std::uint64_t> &counts) {
            std::mt19937_64 rng(detail::splitmix64(mc.seed ^ detail::splitmix64(blk)));
            auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
            std::uint64_t lo = mc.samples * blk / detail::kSampleBlocks;
            std::uint64_t hi = mc.samples * (blk + 1) / detail::kSampleBlocks;
            for (std::uint64_t s = lo; s < hi; s++) {
                PhasePoint pt{uniform(), uniform()};
                std::size_t code = 0;
                for (std::size_t j = 0; j < J; j++) {
                    auto sym = static_cast<std::size_t>(static_cast<double>(K) * pt.Q);
                    code = code * K + std::min(sym, K - 1);
                    pt = cat_step(pt);
                }
                counts[code]++;
            }
        };
    }
    parallel_for(workers, workers, [&](std::size_t w) {
        partial[w].assign(words, 0);
        for (std::size_t blk = w; blk < detail::kSampleBlocks; blk += workers) {
            run_block(blk, partial[w]);
        }
    });
    table.counts.assign(words, 0);
    for (const auto &counts : partial) {
        for (std::size_t i = 0; i < words; i++) {
            table.counts[i] += counts[i];
        }
    }
    return table;
}

/// S_cl(J) = -sum mu ln mu for J = 1..J_max, from one table at J_max.
inline EntropySeries classical_entropy_series(std::size_t J_max, std::size_t K, const Sampler &sampler,
                                              std::size_t workers = 1) {
    CylinderTable table = cylinder_measures(J_max, K, sampler, workers);
    EntropySeries series;
    series.method = Method::classical;
    series.config.N = 0;
    series.config.n = 0;
    series.config.I = 0;
    series.config.R = 0;
    series.config.V = 0.0;
    series.config.K = K;
    series.config.J_max = J_max;
    series.sampler = table.sampler;
    series.points.resize(J_max);
    for (std::size_t J = J_max; J >= 1; J--) {
        series.points[J - 1] = {J, table.shannon_entropy(), 0.0};
        if (J > 1) {
            table = table.shortened();
        }
    }
    return series;
}

}  // namespace qcat

#endif
