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

// Kinematics on the quantized torus: position lattices of the big and small
// particles, the row-major multi-particle index layout, and the unitary
// position <-> momentum transforms along each axis.

#ifndef QCAT_TORUS_HPP
#define QCAT_TORUS_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcat/config.hpp"
#include "qcat/fft.hpp"

namespace qcat {

/// Lattice sites of every particle.
///
/// Positions are stored both as reals and as integer sites in units of 1/N, so
/// the small-on-big subset property can be checked exactly.
struct LatticeSpec {
    std::vector<double> big_positions;
    /// small_positions[i][j] = j/n + s_i/N.
    std::vector<std::vector<double>> small_positions;
    /// small_sites[i][j] = (N/n) j + s_i.
    std::vector<std::vector<std::size_t>> small_sites;
    std::vector<std::size_t> big_momenta;
    std::vector<std::size_t> small_momenta;

    bool small_lattices_inside_big(std::size_t N) const {
        for (const auto &sites : small_sites) {
            for (auto s : sites) {
                if (s >= N) {
                    return false;
                }
            }
        }
        return true;
    }
};

inline LatticeSpec build_lattice(SystemConfig config) {
    config.validate();
    const std::size_t N = config.N;
    const std::size_t n = config.n;
    LatticeSpec lat;
    lat.big_positions.resize(N);
    lat.big_momenta.resize(N);
    for (std::size_t j = 0; j < N; j++) {
        lat.big_positions[j] = static_cast<double>(j) / static_cast<double>(N);
        lat.big_momenta[j] = j;
    }
    lat.small_momenta.resize(n);
    for (std::size_t k = 0; k < n; k++) {
        lat.small_momenta[k] = k;
    }
    for (std::size_t i = 0; i < config.I; i++) {
        std::vector<double> q(n);
        std::vector<std::size_t> site(n);
        for (std::size_t j = 0; j < n; j++) {
            site[j] = config.ratio() * j + config.shifts[i];
            q[j] = static_cast<double>(j) / static_cast<double>(n) +
                   static_cast<double>(config.shifts[i]) / static_cast<double>(N);
        }
        lat.small_positions.push_back(std::move(q));
        lat.small_sites.push_back(std::move(site));
    }
    return lat;
}

/// Splits a flat row-major index into (j_0, j_1, ..., j_I).
inline std::vector<std::size_t> multi_index(std::size_t flat, const Shape &shape) {
    if (flat >= shape.total()) {
        throw std::out_of_range(
            "flat index " + std::to_string(flat) + " out of range [0, " + std::to_string(shape.total()) + ")");
    }
    std::vector<std::size_t> idx(shape.num_axes());
    for (std::size_t axis = shape.num_axes(); axis-- > 0;) {
        std::size_t d = shape.axis_size(axis);
        idx[axis] = flat % d;
        flat /= d;
    }
    return idx;
}

inline std::size_t flat_index(std::span<const std::size_t> idx, const Shape &shape) {
    if (idx.size() != shape.num_axes()) {
        throw std::out_of_range(
            "multi-index has " + std::to_string(idx.size()) + " entries, expected " +
            std::to_string(shape.num_axes()));
    }
    std::size_t flat = 0;
    for (std::size_t axis = 0; axis < idx.size(); axis++) {
        std::size_t d = shape.axis_size(axis);
        if (idx[axis] >= d) {
            throw std::out_of_range(
                "index " + std::to_string(idx[axis]) + " on axis " + std::to_string(axis) + " out of range [0, " +
                std::to_string(d) + ")");
        }
        flat = flat * d + idx[axis];
    }
    return flat;
}

enum class Representation { position, momentum };
enum class Direction { forward, inverse };

/// Multi-particle wavefunction on the lattice, with a representation tag per axis.
class StateVector {
   public:
    StateVector() = default;
    StateVector(Shape shape, std::vector<cplx> amplitudes, Representation rep = Representation::position)
        : shape_(shape), amps_(std::move(amplitudes)), reps_(shape.num_axes(), rep) {
        if (amps_.size() != shape_.total()) {
            throw std::invalid_argument(
                "amplitude count " + std::to_string(amps_.size()) + " does not match dimension " +
                std::to_string(shape_.total()));
        }
    }

    static StateVector zero(Shape shape, Representation rep = Representation::position) {
        return StateVector(shape, std::vector<cplx>(shape.total()), rep);
    }
    static StateVector basis(Shape shape, std::size_t flat, Representation rep = Representation::position) {
        auto s = zero(shape, rep);
        s.amps_.at(flat) = 1.0;
        return s;
    }

    const Shape &shape() const {
        return shape_;
    }
    std::size_t size() const {
        return amps_.size();
    }
    std::span<cplx> amplitudes() {
        return amps_;
    }
    std::span<const cplx> amplitudes() const {
        return amps_;
    }
    cplx &operator[](std::size_t i) {
        return amps_[i];
    }
    const cplx &operator[](std::size_t i) const {
        return amps_[i];
    }

    Representation axis_representation(std::size_t axis) const {
        return reps_.at(axis);
    }
    void set_axis_representation(std::size_t axis, Representation rep) {
        reps_.at(axis) = rep;
    }
    bool all_in(Representation rep) const {
        for (auto r : reps_) {
            if (r != rep) {
                return false;
            }
        }
        return true;
    }

    double norm_squared() const {
        double s = 0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }
    double norm() const {
        return std::sqrt(norm_squared());
    }

   private:
    Shape shape_;
    std::vector<cplx> amps_;
    std::vector<Representation> reps_;
};

/// Unitary DFT along one axis. Forward maps position values to momentum
/// coefficients with kernel e^{+2 pi i k j / d} / sqrt(d); inverse undoes it.
inline StateVector axis_dft(StateVector state, std::size_t axis, Direction direction) {
    const Shape &shape = state.shape();
    if (axis >= shape.num_axes()) {
        throw std::out_of_range(
            "axis " + std::to_string(axis) + " out of range for " + std::to_string(shape.num_axes()) + " axes");
    }
    Representation expected = direction == Direction::forward ? Representation::position : Representation::momentum;
    if (state.axis_representation(axis) != expected) {
        throw std::invalid_argument(
            std::string("axis ") + std::to_string(axis) + " must be in the " +
            (expected == Representation::position ? "position" : "momentum") + " representation");
    }
    Radix2Dft dft(shape.axis_size(axis));
    std::vector<cplx> line;
    dft.transform_axis(state.amplitudes(), shape, axis, direction == Direction::forward ? +1 : -1, line);
    state.set_axis_representation(
        axis, direction == Direction::forward ? Representation::momentum : Representation::position);
    return state;
}

inline StateVector to_momentum(StateVector state) {
    for (std::size_t axis = 0; axis < state.shape().num_axes(); axis++) {
        state = axis_dft(std::move(state), axis, Direction::forward);
    }
    return state;
}

inline StateVector to_position(StateVector state) {
    for (std::size_t axis = 0; axis < state.shape().num_axes(); axis++) {
        state = axis_dft(std::move(state), axis, Direction::inverse);
    }
    return state;
}

}  // namespace qcat

#endif
