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


#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qcat/fft.hpp"
#include "qcat/torus.hpp"

using qcat::cplx;
using qcat::Direction;
using qcat::Representation;
using qcat::Shape;
using qcat::StateVector;
using qcat::SystemConfig;

namespace {

SystemConfig make(std::size_t N, std::size_t n, std::size_t I, std::vector<std::size_t> shifts = {}) {
    SystemConfig c;
    c.N = N;
    c.n = n;
    c.I = I;
    c.shifts = std::move(shifts);
    c.K = std::min<std::size_t>(4, N);
    return c;
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

}  // namespace

TEST(Config, RejectsBadShapes) {
    EXPECT_THROW(make(12, 2, 0).validate(), qcat::config_error);
    EXPECT_THROW(make(16, 32, 0).validate(), qcat::config_error);
    EXPECT_THROW(make(16, 3, 0).validate(), qcat::config_error);
    EXPECT_THROW(make(16, 2, 1, {8}).validate(), qcat::config_error);
    EXPECT_THROW(make(16, 2, 2, {0}).validate(), qcat::config_error);
    auto c = make(16, 2, 0);
    c.K = 3;
    EXPECT_THROW(c.validate(), qcat::config_error);
    c = make(16, 2, 0);
    c.V = std::nan("");
    EXPECT_THROW(c.validate(), qcat::config_error);
    c = make(16, 2, 0);
    c.R = 0;
    EXPECT_THROW(c.validate(), qcat::config_error);
}

TEST(Config, NamesTheDivisibilityConstraint) {
    auto c = make(16, 32, 0);
    try {
        c.validate();
        FAIL();
    } catch (const qcat::config_error &e) {
        EXPECT_NE(std::string(e.what()).find("divide"), std::string::npos) << e.what();
    }
}

TEST(Config, DimensionBudget) {
    auto c = make(64, 4, 3);
    c.max_dim = 1024;
    EXPECT_THROW(c.validate(), qcat::budget_error);
}

TEST(Config, DefaultShiftsAreDistinctModRatio) {
    auto c = make(16, 2, 3);
    c.validate();
    EXPECT_EQ(c.shifts, (std::vector<std::size_t>{0, 1, 2}));
    auto d = make(4, 2, 3);
    d.validate();
    EXPECT_EQ(d.shifts, (std::vector<std::size_t>{0, 1, 0}));
}

TEST(Config, HashSeparatesParameters) {
    auto a = make(16, 2, 1);
    a.validate();
    auto b = a;
    b.V = 8.0;
    auto c = a;
    c.R = 8;
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(a.hash_hex().size(), 16u);
    auto a2 = make(16, 2, 1);
    a2.validate();
    EXPECT_EQ(a.hash(), a2.hash());
}

TEST(Lattice, SmallPositionsWithoutShift) {
    auto lat = qcat::build_lattice(make(4, 2, 1, {0}));
    EXPECT_EQ(lat.small_positions[0], (std::vector<double>{0.0, 0.5}));
    EXPECT_EQ(lat.big_positions, (std::vector<double>{0.0, 0.25, 0.5, 0.75}));
    EXPECT_TRUE(lat.small_lattices_inside_big(4));
}

TEST(Lattice, SmallPositionsWithShift) {
    auto lat = qcat::build_lattice(make(4, 2, 1, {1}));
    EXPECT_EQ(lat.small_positions[0], (std::vector<double>{0.25, 0.75}));
    EXPECT_EQ(lat.small_sites[0], (std::vector<std::size_t>{1, 3}));
}

TEST(Lattice, EqualSizesCoincide) {
    auto lat = qcat::build_lattice(make(8, 8, 1, {0}));
    EXPECT_EQ(lat.small_positions[0], lat.big_positions);
}

TEST(Lattice, SubsetPropertyForAllShifts) {
    for (std::size_t N : {2u, 4u, 8u, 16u, 32u}) {
        for (std::size_t n = 2; n <= N; n *= 2) {
            for (std::size_t s = 0; s < N / n; s++) {
                auto c = make(N, n, 1, {s});
                auto lat = qcat::build_lattice(c);
                EXPECT_TRUE(lat.small_lattices_inside_big(N)) << N << " " << n << " " << s;
            }
        }
    }
}

TEST(Index, ExamplesAndErrors) {
    Shape s{4, 2, 1};
    EXPECT_EQ(qcat::multi_index(0, s), (std::vector<std::size_t>{0, 0}));
    EXPECT_EQ(qcat::multi_index(5, s), (std::vector<std::size_t>{2, 1}));
    EXPECT_THROW(qcat::multi_index(8, s), std::out_of_range);
    std::vector<std::size_t> bad{4, 0};
    EXPECT_THROW(qcat::flat_index(bad, s), std::out_of_range);
    std::vector<std::size_t> short_idx{1};
    EXPECT_THROW(qcat::flat_index(short_idx, s), std::out_of_range);
}

TEST(Index, RoundTripOverFullRange) {
    for (Shape s : {Shape{4, 2, 2}, Shape{16, 2, 3}, Shape{8, 4, 1}, Shape{8, 2, 0}}) {
        for (std::size_t x = 0; x < s.total(); x++) {
            auto idx = qcat::multi_index(x, s);
            ASSERT_EQ(qcat::flat_index(idx, s), x);
        }
    }
}

TEST(Dft, DeltaIsFlat) {
    StateVector psi = StateVector::basis(Shape{4, 2, 0}, 0);
    auto c = qcat::axis_dft(psi, 0, Direction::forward);
    for (std::size_t k = 0; k < 4; k++) {
        EXPECT_NEAR(std::abs(c[k] - cplx(0.5, 0.0)), 0.0, 1e-15);
    }
    EXPECT_EQ(c.axis_representation(0), Representation::momentum);
}

TEST(Dft, PlaneWaveIsBasisVector) {
    std::vector<cplx> a(4);
    for (std::size_t j = 0; j < 4; j++) {
        a[j] = std::polar(0.5, -2.0 * std::numbers::pi * static_cast<double>(j) / 4.0);
    }
    auto c = qcat::axis_dft(StateVector(Shape{4, 2, 0}, a), 0, Direction::forward);
    std::vector<cplx> expect{0.0, 1.0, 0.0, 0.0};
    EXPECT_LT(max_diff(c.amplitudes(), expect), 1e-15);
}

TEST(Dft, MatchesNaiveOracleAllSizes) {
    for (std::size_t d = 2; d <= 256; d *= 2) {
        auto x = oracle::random_state(d, d);
        qcat::Radix2Dft dft(d);
        for (int sign : {+1, -1}) {
            auto y = x;
            dft.transform(y, sign);
            EXPECT_LT(max_diff(y, oracle::naive_dft(x, sign)), 1e-12) << d << " " << sign;
        }
    }
}

TEST(Dft, ParsevalAndRoundTripEveryAxis) {
    for (Shape s : {Shape{2, 2, 1}, Shape{8, 2, 2}, Shape{16, 4, 1}, Shape{32, 2, 0}}) {
        StateVector psi(s, oracle::random_state(s.total(), 7));
        for (std::size_t axis = 0; axis < s.num_axes(); axis++) {
            auto c = qcat::axis_dft(psi, axis, Direction::forward);
            EXPECT_NEAR(c.norm(), psi.norm(), 1e-12);
            auto back = qcat::axis_dft(c, axis, Direction::inverse);
            EXPECT_LT(max_diff(back.amplitudes(), psi.amplitudes()), 1e-12);
        }
    }
}

TEST(Dft, RepresentationMisuse) {
    StateVector psi = StateVector::basis(Shape{4, 2, 1}, 0);
    EXPECT_THROW(qcat::axis_dft(psi, 2, Direction::forward), std::out_of_range);
    EXPECT_THROW(qcat::axis_dft(psi, 0, Direction::inverse), std::invalid_argument);
    auto c = qcat::axis_dft(psi, 0, Direction::forward);
    EXPECT_THROW(qcat::axis_dft(c, 0, Direction::forward), std::invalid_argument);
    EXPECT_THROW(qcat::Radix2Dft(6), std::invalid_argument);
}

TEST(Dft, SingleAxisStateEqualsAxisTransform) {
    StateVector psi(Shape{16, 2, 0}, oracle::random_state(16, 3));
    auto a = qcat::to_momentum(psi);
    auto b = qcat::axis_dft(psi, 0, Direction::forward);
    for (std::size_t k = 0; k < 16; k++) {
        EXPECT_EQ(a[k], b[k]);
    }
}

TEST(Dft, ProductStateTransformsFactorwise) {
    // N=4, n=2, I=2: psi = a (x) b (x) c.
    auto a = oracle::random_state(4, 11);
    auto b = oracle::random_state(2, 12);
    auto c = oracle::random_state(2, 13);
    Shape s{4, 2, 2};
    std::vector<cplx> prod(s.total());
    for (std::size_t i = 0; i < 4; i++) {
        for (std::size_t j = 0; j < 2; j++) {
            for (std::size_t k = 0; k < 2; k++) {
                prod[(i * 2 + j) * 2 + k] = a[i] * b[j] * c[k];
            }
        }
    }
    auto m = qcat::to_momentum(StateVector(s, prod));
    EXPECT_TRUE(m.all_in(Representation::momentum));
    auto fa = oracle::naive_dft(a, +1);
    auto fb = oracle::naive_dft(b, +1);
    auto fc = oracle::naive_dft(c, +1);
    for (std::size_t i = 0; i < 4; i++) {
        for (std::size_t j = 0; j < 2; j++) {
            for (std::size_t k = 0; k < 2; k++) {
                EXPECT_LT(std::abs(m[(i * 2 + j) * 2 + k] - fa[i] * fb[j] * fc[k]), 1e-14);
            }
        }
    }
    auto back = qcat::to_position(m);
    EXPECT_LT(max_diff(back.amplitudes(), prod), 1e-14);
}

TEST(Dft, NormPreservedOnRandomStates) {
    Shape s{16, 2, 3};
    for (std::uint64_t seed = 0; seed < 20; seed++) {
        StateVector psi(s, oracle::random_state(s.total(), seed));
        EXPECT_NEAR(qcat::to_momentum(psi).norm(), 1.0, 1e-12);
    }
}

TEST(StateVector, SizeMismatchAndBasis) {
    EXPECT_THROW(StateVector(Shape{4, 2, 1}, std::vector<cplx>(7)), std::invalid_argument);
    EXPECT_THROW(StateVector::basis(Shape{4, 2, 1}, 8), std::out_of_range);
    auto e = StateVector::basis(Shape{4, 2, 1}, 3);
    EXPECT_DOUBLE_EQ(e.norm_squared(), 1.0);
}
