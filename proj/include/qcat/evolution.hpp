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

#ifndef QCAT_EVOLUTION_HPP
#define QCAT_EVOLUTION_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcat/config.hpp"
#include "qcat/fft.hpp"
#include "qcat/parallel.hpp"
#include "qcat/torus.hpp"

namespace qcat {

/// e^{-i pi k^2 / d}: one period of free rotation for momentum label k on an axis of size d.
inline cplx free_phase(std::size_t d, std::size_t k) {
    if (d % 2 != 0) {
        throw std::invalid_argument("free_phase needs an even dimension (got " + std::to_string(d) + ")");
    }
    if (k >= d) {
        throw std::out_of_range("momentum label " + std::to_string(k) + " out of range [0, " + std::to_string(d) + ")");
    }
    // k^2 mod 2d keeps the angle in [0, 2 pi) without losing digits.
    std::size_t r = (k * k) % (2 * d);
    double angle = -std::numbers::pi * static_cast<double>(r) / static_cast<double>(d);
    return {std::cos(angle), std::sin(angle)};
}

/// e^{+i pi j^2 / N}: the kick applied at big-particle position label j.
inline cplx kick_phase(std::size_t N, std::size_t j) {
    if (j >= N) {
        throw std::out_of_range("position label " + std::to_string(j) + " out of range [0, " + std::to_string(N) + ")");
    }
    std::size_t r = (j * j) % (2 * N);
    double angle = std::numbers::pi * static_cast<double>(r) / static_cast<double>(N);
    return {std::cos(angle), std::sin(angle)};
}

/// Number of small particles sitting on the big particle's lattice site, for
/// every multi-index: count = sum_i [j_0 == (N/n) j_i + s_i].
inline std::vector<std::uint16_t> scattering_counts(const SystemConfig &config, const LatticeSpec &lattice) {
    const Shape shape = config.shape();
    const std::size_t total = shape.total();
    const std::size_t volume = shape.small_volume();
    std::vector<std::uint16_t> counts(total, 0);
    for (std::size_t flat = 0; flat < total; flat++) {
        std::size_t j0 = flat / volume;
        std::size_t rest = flat % volume;
        std::uint16_t c = 0;
        for (std::size_t axis = config.I; axis >= 1; axis--) {
            std::size_t ji = rest % config.n;
            rest /= config.n;
            if (lattice.small_sites[axis - 1][ji] == j0) {
                c++;
            }
        }
        counts[flat] = c;
    }
    return counts;
}

/// Diagonal phase tables of the period propagator.
struct PropagatorFactors {
    Shape shape;
    std::size_t R = 1;
    double V = 0.0;
    std::vector<cplx> free_phases_big;
    std::vector<cplx> free_phases_small;
    std::vector<cplx> kick_phases;
    std::vector<std::uint16_t> scattering_counts;
    /// e^{-i (V/R) c} for c = 0..I, indexed by count.
    std::vector<cplx> substep_scatter_phases;
    /// One Trotter substep of free motion, over the full momentum grid.
    std::vector<cplx> substep_free_phases;
    /// One full period of free motion, over the full momentum grid.
    std::vector<cplx> period_free_phases;

    /// True when the scattering factor is the identity and the Trotter product collapses.
    bool decoupled() const {
        return shape.particles == 0 || V == 0.0;
    }
};

inline PropagatorFactors build_factors(SystemConfig config) {
    config.validate();
    const Shape shape = config.shape();
    PropagatorFactors f;
    f.shape = shape;
    f.R = config.R;
    f.V = config.V;
    const std::size_t N = config.N;
    const std::size_t n = config.n;
    const double R = static_cast<double>(config.R);
    f.free_phases_big.resize(N);
    f.kick_phases.resize(N);
    for (std::size_t k = 0; k < N; k++) {
        f.free_phases_big[k] = free_phase(N, k);
        f.kick_phases[k] = kick_phase(N, k);
    }
    f.free_phases_small.resize(n);
    for (std::size_t k = 0; k < n; k++) {
        f.free_phases_small[k] = free_phase(n, k);
    }
    f.scattering_counts = scattering_counts(config, build_lattice(config));
    f.substep_scatter_phases.resize(config.I + 1);
    for (std::size_t c = 0; c <= config.I; c++) {
        double angle = -config.V / R * static_cast<double>(c);
        f.substep_scatter_phases[c] = {std::cos(angle), std::sin(angle)};
    }

    // Per-axis substep phases e^{-i pi k^2 / (d R)}; these are not periodic in k,
    // so the labels k = 0..d-1 are used as given.
    auto substep = [R](std::size_t d, std::size_t k) {
        double angle = -std::numbers::pi * static_cast<double>(k * k) / (static_cast<double>(d) * R);
        return cplx(std::cos(angle), std::sin(angle));
    };
    const std::size_t total = shape.total();
    const std::size_t volume = shape.small_volume();
    f.substep_free_phases.resize(total);
    f.period_free_phases.resize(total);
    for (std::size_t flat = 0; flat < total; flat++) {
        std::size_t k0 = flat / volume;
        std::size_t rest = flat % volume;
        cplx sub = substep(N, k0);
        cplx full = f.free_phases_big[k0];
        for (std::size_t axis = 0; axis < config.I; axis++) {
            std::size_t ki = rest % n;
            rest /= n;
            sub *= substep(n, ki);
            full *= f.free_phases_small[ki];
        }
        f.substep_free_phases[flat] = sub;
        f.period_free_phases[flat] = full;
    }
    return f;
}

/// Applies one kick period U = U_kick * prod_{r=1..R} [U_scatter^{1/R} U_free^{1/R}]
/// in place. Holds its own DFT plans; callers supply the scratch line.
class PeriodPropagator {
   public:
    explicit PeriodPropagator(PropagatorFactors factors)
        : factors_(std::move(factors)), big_(factors_.shape.big), small_(factors_.shape.small) {
    }
    explicit PeriodPropagator(const SystemConfig &config) : PeriodPropagator(build_factors(config)) {
    }

    const PropagatorFactors &factors() const {
        return factors_;
    }
    const Shape &shape() const {
        return factors_.shape;
    }

    void apply_inplace(std::span<cplx> data, std::vector<cplx> &line) const {
        const Shape &shape = factors_.shape;
        if (data.size() != shape.total()) {
            throw std::invalid_argument("state size does not match propagator dimension");
        }
        if (factors_.decoupled()) {
            free_step(data, factors_.period_free_phases, line);
        } else {
            for (std::size_t r = 0; r < factors_.R; r++) {
                free_step(data, factors_.substep_free_phases, line);
                for (std::size_t i = 0; i < data.size(); i++) {
                    data[i] *= factors_.substep_scatter_phases[factors_.scattering_counts[i]];
                }
            }
        }
        const std::size_t volume = shape.small_volume();
        for (std::size_t i = 0; i < data.size(); i++) {
            data[i] *= factors_.kick_phases[i / volume];
        }
    }

    StateVector operator()(StateVector state) const {
        if (!state.all_in(Representation::position)) {
            throw std::invalid_argument("period propagator expects a position-representation state");
        }
        if (state.shape() != factors_.shape) {
            throw std::invalid_argument("state shape does not match propagator shape");
        }
        std::vector<cplx> line;
        apply_inplace(state.amplitudes(), line);
        return state;
    }

   private:
    void free_step(std::span<cplx> data, const std::vector<cplx> &phases, std::vector<cplx> &line) const {
        const Shape &shape = factors_.shape;
        for (std::size_t axis = 0; axis < shape.num_axes(); axis++) {
            dft(axis).transform_axis(data, shape, axis, +1, line);
        }
        for (std::size_t i = 0; i < data.size(); i++) {
            data[i] *= phases[i];
        }
        for (std::size_t axis = 0; axis < shape.num_axes(); axis++) {
            dft(axis).transform_axis(data, shape, axis, -1, line);
        }
    }
    const Radix2Dft &dft(std::size_t axis) const {
        return axis == 0 ? big_ : small_;
    }

    PropagatorFactors factors_;
    Radix2Dft big_;
    Radix2Dft small_;
};

/// Single-particle quantum cat U^cat = K U^free: transform to momentum, apply the
/// free phases, transform back, apply the kick phases.
inline StateVector apply_cat_single(StateVector state) {
    const Shape &shape = state.shape();
    if (shape.particles != 0) {
        throw std::invalid_argument("apply_cat_single needs a single-particle (I=0) state");
    }
    if (!state.all_in(Representation::position)) {
        throw std::invalid_argument("apply_cat_single expects a position-representation state");
    }
    const std::size_t N = shape.big;
    state = to_momentum(std::move(state));
    for (std::size_t k = 0; k < N; k++) {
        state[k] *= free_phase(N, k);
    }
    state = to_position(std::move(state));
    for (std::size_t j = 0; j < N; j++) {
        state[j] *= kick_phase(N, j);
    }
    return state;
}

inline StateVector apply_period_multi(StateVector state, const PropagatorFactors &factors) {
    return PeriodPropagator(factors)(std::move(state));
}

/// Dense matrix of a propagator in the position basis.
struct DenseUnitary {
    Eigen::MatrixXcd matrix;

    std::size_t dim() const {
        return static_cast<std::size_t>(matrix.rows());
    }
    /// Spectral norm of U^dagger U - I.
    double unitarity_residual() const {
        Eigen::MatrixXcd g = matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols());
        Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    /// Largest |<u_a, u_b> - delta_ab| over column pairs.
    double max_column_overlap_error() const {
        Eigen::MatrixXcd g = matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols());
        return g.cwiseAbs().maxCoeff();
    }
};

/// Bytes needed for a dense complex matrix of the given size.
inline std::size_t dense_bytes(std::size_t rows, std::size_t cols) {
    if (rows != 0 && cols > std::numeric_limits<std::size_t>::max() / sizeof(cplx) / rows) {
        return std::numeric_limits<std::size_t>::max();
    }
    return rows * cols * sizeof(cplx);
}

/// Materializes a position-space propagator column by column. `applier` maps a
/// StateVector to its image. Columns are computed in parallel; each column is
/// produced by the same sequential code whatever the worker count.
template <typename Applier>
DenseUnitary materialize_unitary(const Applier &applier, const Shape &shape, std::size_t workers = 1,
                                 std::size_t max_bytes = std::size_t{1} << 31) {
    const std::size_t dim = shape.total();
    if (dim > (std::size_t{1} << 20) || dense_bytes(dim, dim) > max_bytes) {
        throw budget_error(
            "dense propagator of dimension " + std::to_string(dim) + " exceeds the memory budget of " +
            std::to_string(max_bytes) + " bytes");
    }
    DenseUnitary u;
    u.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    parallel_for(dim, workers, [&](std::size_t col) {
        StateVector image = applier(StateVector::basis(shape, col));
        auto amps = image.amplitudes();
        for (std::size_t row = 0; row < dim; row++) {
            u.matrix(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = amps[row];
        }
    });
    return u;
}

/// Dense period propagator of a configuration.
inline DenseUnitary period_unitary(const SystemConfig &config, std::size_t workers = 1,
                                   std::size_t max_bytes = std::size_t{1} << 31) {
    PeriodPropagator prop(config);
    return materialize_unitary(prop, prop.shape(), workers, max_bytes);
}

}  // namespace qcat

#endif
