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

// Quantum histories over a partition of the big-particle position and the
// decoherence matrix built from them.
//
// A history operator for the word s = (s_0, ..., s_{J-1}) is
//
//     B_s = U P_{s_{J-1}} ... U P_{s_0},
//
// and D_{s,t} = Tr(B_s^dagger B_t) / dim. Because the projectors are diagonal
// and U is unitary, D_{s,t} vanishes unless s and t agree in their first and
// last symbols, and the trailing U cancels inside the trace. The engine below
// therefore stores, for every word, only
//
//     C_s = P_{s_{J-1}} U P_{s_{J-2}} ... U P_{s_0}
//
// restricted to rows in cell s_{J-1} and columns in cell s_0, and works block
// by block over (first, last) symbol pairs.

#ifndef QCAT_HISTORIES_HPP
#define QCAT_HISTORIES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcat/config.hpp"
#include "qcat/evolution.hpp"
#include "qcat/parallel.hpp"
#include "qcat/spectral.hpp"
#include "qcat/torus.hpp"

namespace qcat {

/// K equal cells of the big-particle position, Q in [k/K, (k+1)/K).
///
/// With the big axis leading, cell k is the contiguous flat range
/// [k * cell_size, (k+1) * cell_size).
class PartitionProjectors {
   public:
    PartitionProjectors(Shape shape, std::size_t cells) : shape_(shape), cells_(cells) {
        if (cells == 0 || shape.big % cells != 0) {
            throw config_error(
                "K must divide N (got N=" + std::to_string(shape.big) + ", K=" + std::to_string(cells) + ")");
        }
        cell_size_ = shape.total() / cells;
    }

    const Shape &shape() const {
        return shape_;
    }
    std::size_t cells() const {
        return cells_;
    }
    std::size_t dim() const {
        return shape_.total();
    }
    /// Tr P_k, identical for every cell.
    std::size_t cell_size() const {
        return cell_size_;
    }
    std::size_t begin(std::size_t k) const {
        return k * cell_size_;
    }
    std::size_t cell_of(std::size_t flat) const {
        return flat / cell_size_;
    }
    /// 0/1 diagonal of P_k.
    std::vector<std::uint8_t> mask(std::size_t k) const {
        std::vector<std::uint8_t> m(dim(), 0);
        for (std::size_t i = begin(k); i < begin(k) + cell_size_; i++) {
            m[i] = 1;
        }
        return m;
    }
    void apply(std::size_t k, std::span<cplx> data) const {
        for (std::size_t i = 0; i < data.size(); i++) {
            if (cell_of(i) != k) {
                data[i] = 0.0;
            }
        }
    }

   private:
    Shape shape_;
    std::size_t cells_;
    std::size_t cell_size_ = 0;
};

inline PartitionProjectors build_projectors(const SystemConfig &config) {
    return PartitionProjectors(config.shape(), config.K);
}

/// A symbol sequence (s_0, ..., s_{J-1}) over an alphabet of K cells.
struct HistoryWord {
    std::vector<std::size_t> symbols;

    std::size_t length() const {
        return symbols.size();
    }
    /// Base-K number with s_0 as the most significant digit.
    std::size_t index(std::size_t K) const {
        std::size_t idx = 0;
        for (auto s : symbols) {
            idx = idx * K + s;
        }
        return idx;
    }
    static HistoryWord from_index(std::size_t index, std::size_t J, std::size_t K) {
        if (J < 1) {
            throw std::invalid_argument("history words have length >= 1");
        }
        HistoryWord w;
        w.symbols.resize(J);
        for (std::size_t j = J; j-- > 0;) {
            w.symbols[j] = index % K;
            index /= K;
        }
        return w;
    }
};

/// psi_s = (U P_{s_{J-1}}) ... (U P_{s_0}) psi.
template <typename Applier>
StateVector history_apply(const HistoryWord &word, const Applier &applier, const PartitionProjectors &projectors,
                          StateVector psi) {
    if (word.length() < 1) {
        throw std::invalid_argument("history words have length >= 1");
    }
    for (auto s : word.symbols) {
        if (s >= projectors.cells()) {
            throw std::out_of_range("history symbol " + std::to_string(s) + " out of range");
        }
        projectors.apply(s, psi.amplitudes());
        psi = applier(std::move(psi));
    }
    return psi;
}

/// Decoherence matrix over all K^J words, indexed by HistoryWord::index.
struct DecoherenceMatrix {
    Eigen::MatrixXcd matrix;
    std::size_t J = 0;
    std::size_t K = 0;
    std::size_t dim = 0;

    double trace() const {
        return matrix.trace().real();
    }
};

/// All history blocks C_s of one word length, stored as vectorized columns.
///
/// Column order groups words by (first, last) symbol so each block of D is a
/// contiguous column range: pos = (first * K + last) * K^{J-2} + middle for
/// J >= 2, and pos = first for J = 1. `middle` is the base-K number formed by
/// s_1 .. s_{J-2}.
class HistoryLevel {
   public:
    /// Level J = 1: C_a is the identity on cell a.
    static HistoryLevel root(const PartitionProjectors &projectors) {
        HistoryLevel lvl;
        lvl.K_ = projectors.cells();
        lvl.cell_ = projectors.cell_size();
        lvl.dim_ = projectors.dim();
        lvl.J_ = 1;
        lvl.leaves_.setZero(static_cast<Eigen::Index>(lvl.cell_ * lvl.cell_), static_cast<Eigen::Index>(lvl.K_));
        for (std::size_t a = 0; a < lvl.K_; a++) {
            for (std::size_t i = 0; i < lvl.cell_; i++) {
                lvl.leaves_(static_cast<Eigen::Index>(i * lvl.cell_ + i), static_cast<Eigen::Index>(a)) = 1.0;
            }
        }
        return lvl;
    }

    /// Restores a level from stored columns (checkpoint resume).
    static HistoryLevel from_leaves(std::size_t K, std::size_t cell, std::size_t dim, std::size_t J,
                                    Eigen::MatrixXcd leaves) {
        HistoryLevel lvl;
        lvl.K_ = K;
        lvl.cell_ = cell;
        lvl.dim_ = dim;
        lvl.J_ = J;
        if (static_cast<std::size_t>(leaves.rows()) != cell * cell ||
            static_cast<std::size_t>(leaves.cols()) != checked_pow(K, J)) {
            throw std::invalid_argument("history level has the wrong shape");
        }
        lvl.leaves_ = std::move(leaves);
        return lvl;
    }

    std::size_t length() const {
        return J_;
    }
    std::size_t cells() const {
        return K_;
    }
    std::size_t cell_size() const {
        return cell_;
    }
    std::size_t dim() const {
        return dim_;
    }
    std::size_t num_words() const {
        return static_cast<std::size_t>(leaves_.cols());
    }
    const Eigen::MatrixXcd &leaves() const {
        return leaves_;
    }

    /// Number of words per (first, last) block.
    std::size_t block_width() const {
        return J_ == 1 ? 1 : checked_pow(K_, J_ - 2);
    }
    /// Column range of block (first, last); empty for first != last when J = 1.
    std::size_t block_begin(std::size_t first, std::size_t last) const {
        return J_ == 1 ? first : (first * K_ + last) * block_width();
    }
    bool block_present(std::size_t first, std::size_t last) const {
        return J_ != 1 || first == last;
    }

    /// Column position of a word of this level.
    std::size_t position(const HistoryWord &w) const {
        if (w.length() != J_) {
            throw std::invalid_argument("word length does not match the level");
        }
        if (J_ == 1) {
            return w.symbols[0];
        }
        std::size_t middle = 0;
        for (std::size_t j = 1; j + 1 < J_; j++) {
            middle = middle * K_ + w.symbols[j];
        }
        return block_begin(w.symbols[0], w.symbols[J_ - 1]) + middle;
    }

    /// Bytes held by a level of word length J.
    static std::size_t level_bytes(std::size_t K, std::size_t cell, std::size_t J) {
        std::size_t words = checked_pow(K, J);
        std::size_t per = cell * cell * sizeof(cplx);
        if (per != 0 && words > std::numeric_limits<std::size_t>::max() / per) {
            return std::numeric_limits<std::size_t>::max();
        }
        return words * per;
    }

    /// Next word length: C_{s k} = P_k U C_s for every k.
    HistoryLevel expand(const Eigen::MatrixXcd &u, std::size_t workers = 1) const {
        HistoryLevel next;
        next.K_ = K_;
        next.cell_ = cell_;
        next.dim_ = dim_;
        next.J_ = J_ + 1;
        const auto c = static_cast<Eigen::Index>(cell_);
        next.leaves_.resize(leaves_.rows(), static_cast<Eigen::Index>(num_words() * K_));
        const std::size_t width = block_width();
        const std::size_t next_width = next.block_width();
        parallel_for(num_words(), workers, [&](std::size_t pos) {
            std::size_t first = 0;
            std::size_t last = 0;
            std::size_t middle = 0;
            if (J_ == 1) {
                first = last = pos;
            } else {
                std::size_t block = pos / width;
                middle = pos % width;
                first = block / K_;
                last = block % K_;
            }
            // The parent's last symbol joins the middle of every child.
            std::size_t child_middle = J_ == 1 ? 0 : middle * K_ + last;
            Eigen::Map<const Eigen::MatrixXcd> parent(leaves_.col(static_cast<Eigen::Index>(pos)).data(), c, c);
            for (std::size_t k = 0; k < K_; k++) {
                std::size_t child_pos = (first * K_ + k) * next_width + child_middle;
                Eigen::Map<Eigen::MatrixXcd> child(
                    next.leaves_.col(static_cast<Eigen::Index>(child_pos)).data(), c, c);
                child.noalias() = u.block(static_cast<Eigen::Index>(k) * c, static_cast<Eigen::Index>(last) * c, c, c) *
                                  parent;
            }
        });
        return next;
    }

   private:
    std::size_t K_ = 0;
    std::size_t cell_ = 0;
    std::size_t dim_ = 0;
    std::size_t J_ = 0;
    Eigen::MatrixXcd leaves_;
};

/// Spectrum of D for one word length, gathered block by block.
struct DecoherenceSpectrum {
    std::vector<double> eigenvalues;
    double trace = 0.0;
};

/// Nonzero-capable spectrum of D: each (first, last) block is diagonalized through
/// whichever Gram matrix is smaller, G^dagger G or G G^dagger, with G the block's
/// vectorized leaves scaled by dim^{-1/2}. Blocks run in parallel and are
/// concatenated in block order.
inline DecoherenceSpectrum decoherence_spectrum(const HistoryLevel &level, std::size_t workers = 1) {
    const std::size_t K = level.cells();
    const auto width = static_cast<Eigen::Index>(level.block_width());
    const double inv_dim = 1.0 / static_cast<double>(level.dim());
    std::vector<std::vector<double>> block_eigs(K * K);
    std::vector<double> block_trace(K * K, 0.0);
    parallel_for(K * K, workers, [&](std::size_t b) {
        std::size_t first = b / K;
        std::size_t last = b % K;
        if (!level.block_present(first, last)) {
            return;
        }
        auto g = level.leaves().middleCols(static_cast<Eigen::Index>(level.block_begin(first, last)), width);
        Eigen::MatrixXcd gram;
        if (g.cols() <= g.rows()) {
            gram.noalias() = g.adjoint() * g;
        } else {
            gram.noalias() = g * g.adjoint();
        }
        gram *= inv_dim;
        block_trace[b] = gram.trace().real();
        block_eigs[b] = hermitian_eigenvalues(gram);
    });
    DecoherenceSpectrum out;
    for (std::size_t b = 0; b < K * K; b++) {
        out.trace += block_trace[b];
        out.eigenvalues.insert(out.eigenvalues.end(), block_eigs[b].begin(), block_eigs[b].end());
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
    return out;
}

/// Builds the history level of word length J by repeated expansion.
inline HistoryLevel build_history_level(const Eigen::MatrixXcd &u, const PartitionProjectors &projectors,
                                        std::size_t J, std::size_t workers = 1) {
    if (J < 1) {
        throw std::invalid_argument("word length J must be >= 1");
    }
    if (static_cast<std::size_t>(u.rows()) != projectors.dim() || u.rows() != u.cols()) {
        throw std::invalid_argument("propagator dimension does not match the partition");
    }
    HistoryLevel level = HistoryLevel::root(projectors);
    while (level.length() < J) {
        level = level.expand(u, workers);
    }
    return level;
}

/// Full K^J x K^J decoherence matrix, D_{s,t} = Tr(B_s^dagger B_t) / dim, from the
/// Gram matrix of the vectorized history leaves.
inline DecoherenceMatrix decoherence_matrix_direct(const Eigen::MatrixXcd &u, const PartitionProjectors &projectors,
                                                   std::size_t J, std::size_t workers = 1,
                                                   std::size_t max_bytes = std::size_t{1} << 31) {
    const std::size_t K = projectors.cells();
    const std::size_t words = checked_pow(K, J);
    if (dense_bytes(words, words) > max_bytes ||
        HistoryLevel::level_bytes(K, projectors.cell_size(), J) > max_bytes) {
        throw budget_error("decoherence matrix for K^J=" + std::to_string(words) + " words exceeds the memory budget");
    }
    HistoryLevel level = build_history_level(u, projectors, J, workers);
    // Column position of every word, in word-index order.
    std::vector<Eigen::Index> pos(words);
    for (std::size_t w = 0; w < words; w++) {
        pos[w] = static_cast<Eigen::Index>(level.position(HistoryWord::from_index(w, J, K)));
    }
    DecoherenceMatrix d;
    d.J = J;
    d.K = K;
    d.dim = projectors.dim();
    d.matrix.setZero(static_cast<Eigen::Index>(words), static_cast<Eigen::Index>(words));
    const double inv_dim = 1.0 / static_cast<double>(projectors.dim());
    const auto &leaves = level.leaves();
    const std::size_t lead = checked_pow(K, J - 1);
    parallel_for(words, workers, [&](std::size_t s) {
        auto hs = HistoryWord::from_index(s, J, K);
        for (std::size_t t = 0; t < words; t++) {
            std::size_t t_first = t / lead;
            std::size_t t_last = t % K;
            if (t_first != hs.symbols.front() || t_last != hs.symbols.back()) {
                continue;
            }
            d.matrix(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) =
                leaves.col(pos[s]).dot(leaves.col(pos[t])) * inv_dim;
        }
    });
    return d;
}

/// Sums D over the last symbol: the word-length J-1 matrix implied by D.
inline Eigen::MatrixXcd marginalize_last(const DecoherenceMatrix &d) {
    const std::size_t K = d.K;
    const auto parent = static_cast<Eigen::Index>(d.matrix.rows() / static_cast<Eigen::Index>(K));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(parent, parent);
    for (Eigen::Index s = 0; s < parent; s++) {
        for (Eigen::Index t = 0; t < parent; t++) {
            for (std::size_t k = 0; k < K; k++) {
                auto kk = static_cast<Eigen::Index>(k);
                m(s, t) += d.matrix(s * static_cast<Eigen::Index>(K) + kk, t * static_cast<Eigen::Index>(K) + kk);
            }
        }
    }
    return m;
}

/// Channel iteration whose spectrum matches D but whose size, dim^2 x dim^2, does
/// not grow with the word length:
///
///     Omega_0 = |v><v|, v = vec(I) / sqrt(dim),
///     Omega_{j+1} = sum_k A_k Omega_j A_k^dagger,  A_k = I (x) U P_k,
///
/// with column-stacking vectorization, vec index = row + dim * col.
class OmegaIteration {
   public:
    OmegaIteration(const Eigen::MatrixXcd &u, const PartitionProjectors &projectors,
                   std::size_t max_bytes = std::size_t{1} << 31)
        : u_(u), projectors_(projectors) {
        const std::size_t dim = projectors.dim();
        if (static_cast<std::size_t>(u.rows()) != dim || u.rows() != u.cols()) {
            throw std::invalid_argument("propagator dimension does not match the partition");
        }
        if (dim > (std::size_t{1} << 10) || dense_bytes(dim * dim, dim * dim) > max_bytes) {
            throw budget_error(
                "omega matrix of size dim^2=" + std::to_string(dim * dim) + " exceeds the memory budget");
        }
        const auto big = static_cast<Eigen::Index>(dim * dim);
        omega_.setZero(big, big);
        const double inv = 1.0 / static_cast<double>(dim);
        for (std::size_t a = 0; a < dim; a++) {
            for (std::size_t c = 0; c < dim; c++) {
                omega_(static_cast<Eigen::Index>(a + dim * a), static_cast<Eigen::Index>(c + dim * c)) = inv;
            }
        }
    }

    std::size_t steps() const {
        return steps_;
    }
    const Eigen::MatrixXcd &matrix() const {
        return omega_;
    }

    /// Omega <- sum_k A_k Omega A_k^dagger. Block (b, d) of Omega (rows a, cols c)
    /// only mixes with itself: it is pinched to cell(a) == cell(c) and then
    /// conjugated by U. Blocks on and above the diagonal are computed in
    /// parallel; the rest follow from Hermiticity.
    void step(std::size_t workers = 1) {
        const std::size_t dim = projectors_.dim();
        const auto n = static_cast<Eigen::Index>(dim);
        std::vector<std::pair<std::size_t, std::size_t>> upper;
        for (std::size_t b = 0; b < dim; b++) {
            for (std::size_t d = b; d < dim; d++) {
                upper.emplace_back(b, d);
            }
        }
        parallel_for(upper.size(), workers, [&](std::size_t item) {
            auto [b, d] = upper[item];
            auto blk = omega_.block(static_cast<Eigen::Index>(b) * n, static_cast<Eigen::Index>(d) * n, n, n);
            Eigen::MatrixXcd pinched = blk;
            for (Eigen::Index c = 0; c < n; c++) {
                for (Eigen::Index a = 0; a < n; a++) {
                    if (projectors_.cell_of(static_cast<std::size_t>(a)) !=
                        projectors_.cell_of(static_cast<std::size_t>(c))) {
                        pinched(a, c) = 0.0;
                    }
                }
            }
            Eigen::MatrixXcd tmp;
            tmp.noalias() = u_ * pinched;
            blk.noalias() = tmp * u_.adjoint();
        });
        for (std::size_t b = 0; b < dim; b++) {
            for (std::size_t d = b + 1; d < dim; d++) {
                omega_.block(static_cast<Eigen::Index>(d) * n, static_cast<Eigen::Index>(b) * n, n, n) =
                    omega_.block(static_cast<Eigen::Index>(b) * n, static_cast<Eigen::Index>(d) * n, n, n).adjoint();
            }
        }
        steps_++;
    }

   private:
    const Eigen::MatrixXcd &u_;
    const PartitionProjectors &projectors_;
    Eigen::MatrixXcd omega_;
    std::size_t steps_ = 0;
};

inline Eigen::MatrixXcd omega_iteration(const Eigen::MatrixXcd &u, const PartitionProjectors &projectors,
                                        std::size_t J, std::size_t workers = 1,
                                        std::size_t max_bytes = std::size_t{1} << 31) {
    OmegaIteration it(u, projectors, max_bytes);
    for (std::size_t j = 0; j < J; j++) {
        it.step(workers);
    }
    return it.matrix();
}

}  // namespace qcat

#endif
