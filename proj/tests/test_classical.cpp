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
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "qcat/classical.hpp"

using qcat::GridSampler;
using qcat::MonteCarloSampler;
using qcat::PhasePoint;

TEST(CatStep, FixedPointAndHalfPoint) {
    auto a = qcat::cat_step({0.0, 0.0});
    EXPECT_EQ(a.Q, 0.0);
    EXPECT_EQ(a.Ptilde, 0.0);
    auto b = qcat::cat_step({0.5, 0.5});
    EXPECT_NEAR(b.Q, 0.0, 1e-15);
    EXPECT_NEAR(b.Ptilde, 0.5, 1e-15);
}

TEST(CatStep, PushForwardStaysUniform) {
    // Chi-square over 16 x 16 bins; 310.457 is the 0.99 quantile for 255 dof.
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t samples = 1 << 18;
    std::vector<double> bins(256, 0.0);
    for (std::size_t s = 0; s < samples; s++) {
        auto p = qcat::cat_step({u(rng), u(rng)});
        auto bx = std::min<std::size_t>(15, static_cast<std::size_t>(p.Q * 16));
        auto by = std::min<std::size_t>(15, static_cast<std::size_t>(p.Ptilde * 16));
        bins[bx * 16 + by] += 1.0;
    }
    const double expect = static_cast<double>(samples) / 256.0;
    double chi2 = 0.0;
    for (double b : bins) {
        chi2 += (b - expect) * (b - expect) / expect;
    }
    EXPECT_LT(chi2, 310.457);
}

TEST(CatStep, GridMapIsPermutation) {
    const std::size_t G = 64;
    std::set<std::size_t> image;
    for (std::size_t a = 0; a < G; a++) {
        for (std::size_t b = 0; b < G; b++) {
            auto p = qcat::cat_step({static_cast<double>(a) / G, static_cast<double>(b) / G});
            auto qa = static_cast<std::size_t>(std::llround(p.Q * G)) % G;
            auto qb = static_cast<std::size_t>(std::llround(p.Ptilde * G)) % G;
            EXPECT_EQ(qa, (a + b) % G);
            EXPECT_EQ(qb, (a + 2 * b) % G);
            image.insert(qa * G + qb);
        }
    }
    EXPECT_EQ(image.size(), G * G);
}

TEST(KsEntropy, RootOfCharacteristicPolynomial) {
    double h = qcat::ks_entropy();
    EXPECT_GT(h, 0.0);
    double lambda = std::exp(h);
    EXPECT_NEAR(lambda * lambda - 3.0 * lambda + 1.0, 0.0, 1e-14);
    EXPECT_NEAR(h, std::log(1.5 + std::sqrt(1.25)), 1e-14);
}

TEST(Cylinders, SingleSymbolStrips) {
    auto t = qcat::cylinder_measures(1, 4, GridSampler{4096});
    for (std::size_t k = 0; k < 4; k++) {
        EXPECT_DOUBLE_EQ(t.measure(k), 0.25);
    }
}

TEST(Cylinders, GridCountsPartitionTheSamples) {
    auto t = qcat::cylinder_measures(5, 4, GridSampler{1024}, 3);
    EXPECT_EQ(std::accumulate(t.counts.begin(), t.counts.end(), std::uint64_t{0}), t.total);
    EXPECT_EQ(t.total, 1024u * 1024u);
}

TEST(Cylinders, TwoStepAreasMatchPolygonOracle) {
    const std::size_t G = 4096;
    auto t = qcat::cylinder_measures(2, 4, GridSampler{G}, 2);
    double sum = 0.0;
    for (std::size_t w = 0; w < 16; w++) {
        std::vector<std::size_t> word{w / 4, w % 4};
        double exact = oracle::cylinder_area(word, 4);
        sum += exact;
        EXPECT_NEAR(t.measure(w), exact, 2.0 / G) << w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Cylinders, ThreeStepAreasMatchPolygonOracle) {
    const std::size_t G = 4096;
    auto t = qcat::cylinder_measures(3, 4, GridSampler{G});
    double sum = 0.0;
    for (std::size_t w = 0; w < 64; w++) {
        std::vector<std::size_t> word{w / 16, (w / 4) % 4, w % 4};
        double exact = oracle::cylinder_area(word, 4);
        sum += exact;
        EXPECT_NEAR(t.measure(w), exact, 2.0 / G) << w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Cylinders, MonteCarloAgreesWithOracle) {
    auto t = qcat::cylinder_measures(2, 4, MonteCarloSampler{1 << 20, 77});
    for (std::size_t w = 0; w < 16; w++) {
        double exact = oracle::cylinder_area({w / 4, w % 4}, 4);
        // Five binomial standard deviations.
        double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(t.total));
        EXPECT_NEAR(t.measure(w), exact, 5 * sigma + 1e-12) << w;
    }
}

TEST(Cylinders, SamplersAreWorkerIndependent) {
    auto a = qcat::cylinder_measures(4, 4, MonteCarloSampler{1 << 16, 9}, 1);
    auto b = qcat::cylinder_measures(4, 4, MonteCarloSampler{1 << 16, 9}, 8);
    EXPECT_EQ(a.counts, b.counts);
    auto c = qcat::cylinder_measures(4, 4, MonteCarloSampler{1 << 16, 10}, 1);
    EXPECT_NE(a.counts, c.counts);
    auto g1 = qcat::cylinder_measures(4, 4, GridSampler{512}, 1);
    auto g2 = qcat::cylinder_measures(4, 4, GridSampler{512}, 5);
    EXPECT_EQ(g1.counts, g2.counts);
}

TEST(Cylinders, ShortenedTableMatchesDirectTable) {
    auto t5 = qcat::cylinder_measures(5, 4, GridSampler{512});
    auto t4 = qcat::cylinder_measures(4, 4, GridSampler{512});
    EXPECT_EQ(t5.shortened().counts, t4.counts);
}

TEST(Cylinders, BudgetAndArgumentChecks) {
    EXPECT_THROW(qcat::cylinder_measures(12, 4, GridSampler{64}), qcat::budget_error);
    EXPECT_THROW(qcat::cylinder_measures(0, 4, GridSampler{64}), qcat::config_error);
    EXPECT_THROW(qcat::cylinder_measures(2, 4, GridSampler{0}), qcat::config_error);
}

TEST(ClassicalSeries, StartsAtLnFourWithShrinkingIncrements) {
    auto s = qcat::classical_entropy_series(6, 4, GridSampler{4096});
    ASSERT_EQ(s.points.size(), 6u);
    EXPECT_NEAR(s.points[0].S, std::log(4.0), 1e-12);
    for (std::size_t j = 2; j < 6; j++) {
        double prev = s.points[j - 1].S - s.points[j - 2].S;
        double inc = s.points[j].S - s.points[j - 1].S;
        EXPECT_LE(inc, prev * 1.02) << j + 1;
    }
    // The increments approach the KS entropy from above.
    double last = s.points[5].S - s.points[4].S;
    EXPECT_GT(last, qcat::ks_entropy());
    EXPECT_NEAR(last, qcat::ks_entropy(), 0.1 * qcat::ks_entropy());
}
