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
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "qcat/experiments.hpp"

using nlohmann::json;
using qcat::ExperimentKind;

namespace {

qcat::ExperimentPlan plan_of(const std::string &text, ExperimentKind kind, bool heavy = false) {
    return qcat::parse_config(json::parse(text), kind, heavy);
}

template <typename F>
std::string error_of(F &&f) {
    try {
        f();
    } catch (const std::exception &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ParseConfig, MinimalSingleUsesDefaults) {
    auto plan = plan_of(R"({"N": 16, "J_max": 5})", ExperimentKind::single_cat);
    ASSERT_EQ(plan.runs.size(), 1u);
    const auto &c = plan.runs[0].config;
    EXPECT_EQ(c.N, 16u);
    EXPECT_EQ(c.R, 16u);
    EXPECT_EQ(c.K, 4u);
    EXPECT_EQ(c.V, 0.0);
    EXPECT_EQ(c.I, 0u);
    EXPECT_EQ(plan.runs[0].J_max, 5u);
    EXPECT_TRUE(plan.classical_reference);
}

TEST(ParseConfig, DefaultSingleSweepAndHeavyTier) {
    auto plan = plan_of("{}", ExperimentKind::single_cat);
    ASSERT_EQ(plan.runs.size(), 3u);
    EXPECT_EQ(plan.runs[2].config.N, 64u);
    for (const auto &r : plan.runs) {
        EXPECT_EQ(r.J_max, 6u);
    }
    auto heavy = plan_of(R"({"budget": {"max_dim": 256}})", ExperimentKind::single_cat, true);
    ASSERT_EQ(heavy.runs.size(), 5u);
    EXPECT_EQ(heavy.runs[4].config.N, 256u);
}

TEST(ParseConfig, ThreeSmallParticlesAtVEight) {
    auto plan = plan_of(R"({"N": 16, "n": 2, "I": 3, "V": 8, "J_max": 6})", ExperimentKind::multi_cat);
    ASSERT_EQ(plan.runs.size(), 1u);
    const auto &c = plan.runs[0].config;
    EXPECT_EQ(c.shape().total(), 128u);
    EXPECT_EQ(c.V, 8.0);
    EXPECT_EQ(c.shifts, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(plan.runs[0].J_max, 6u);
}

TEST(ParseConfig, RejectsWithFieldNames) {
    EXPECT_NE(error_of([] { plan_of(R"({"N": 16, "n": 32})", ExperimentKind::multi_cat); }).find("n must divide N"),
              std::string::npos);
    EXPECT_THROW(plan_of(R"({"N": 16, "n": 32})", ExperimentKind::multi_cat), qcat::config_error);
    EXPECT_NE(error_of([] { plan_of(R"({"N": 16, "colour": 1})", ExperimentKind::multi_cat); }).find("colour"),
              std::string::npos);
    EXPECT_NE(error_of([] { plan_of(R"({"budget": {"max_ram": 1}})", ExperimentKind::multi_cat); })
                  .find("budget.max_ram"),
              std::string::npos);
    EXPECT_NE(error_of([] { plan_of(R"({"V": "eight"})", ExperimentKind::multi_cat); }).find("V:"), std::string::npos);
    EXPECT_NE(error_of([] { plan_of(R"({"N": -4})", ExperimentKind::multi_cat); }).find("N:"), std::string::npos);
    EXPECT_THROW(plan_of(R"({"kind": "sweep_V"})", ExperimentKind::multi_cat), qcat::config_error);
    EXPECT_THROW(plan_of(R"({"method": "magic"})", ExperimentKind::multi_cat), qcat::config_error);
    EXPECT_THROW(plan_of(R"({"sampler": "sobol"})", ExperimentKind::classical), qcat::config_error);
    EXPECT_THROW(plan_of(R"({"V_list": []})", ExperimentKind::sweep_V), qcat::config_error);
    EXPECT_THROW(plan_of("[1, 2]", ExperimentKind::multi_cat), qcat::config_error);
}

TEST(ParseConfig, BudgetViolations) {
    EXPECT_THROW(plan_of(R"({"N": 16, "I": 3, "budget": {"max_dim": 64}})", ExperimentKind::multi_cat),
                 qcat::budget_error);
    EXPECT_THROW(plan_of(R"({"N": 64, "budget": {"max_bytes": 1000}})", ExperimentKind::multi_cat),
                 qcat::budget_error);
}

TEST(ParseConfig, DefaultWordLengthIsCappedByBudget) {
    auto plan = plan_of(R"({"N": 16, "budget": {"max_words": 256}})", ExperimentKind::multi_cat);
    EXPECT_EQ(plan.runs[0].J_max, 4u);
    auto explicit_J = plan_of(R"({"N": 16, "J_max": 6, "budget": {"max_words": 256}})", ExperimentKind::multi_cat);
    EXPECT_EQ(explicit_J.runs[0].J_max, 6u);
}

TEST(ParseConfig, SweepPlans) {
    auto v = plan_of("{}", ExperimentKind::sweep_V);
    EXPECT_EQ(v.runs.size(), 9u);
    EXPECT_EQ(v.V_grid.front(), 0.0);
    EXPECT_EQ(v.V_grid[1], 0.25);
    EXPECT_EQ(v.V_grid.back(), 32.0);
    for (const auto &r : v.runs) {
        EXPECT_EQ(r.config.I, 2u);
        EXPECT_EQ(r.config.N, 16u);
    }
    EXPECT_EQ(plan_of("{}", ExperimentKind::sweep_V, true).runs[0].config.I, 3u);

    auto i = plan_of("{}", ExperimentKind::sweep_I);
    ASSERT_EQ(i.runs.size(), 4u);
    EXPECT_EQ(i.runs[0].config.V, 8.0);
    EXPECT_EQ(i.runs[2].config.I, 3u);
    EXPECT_EQ(i.runs[3].config.I, 0u);
    EXPECT_EQ(i.runs[3].config.V, 0.0);
    EXPECT_EQ(plan_of(R"({"budget": {"max_dim": 256}})", ExperimentKind::sweep_I, true).runs.size(), 5u);
}

TEST(ParseConfig, SamplerAndSeed) {
    auto plan = plan_of(R"({"sampler": "mc", "mc_samples": 1000, "seed": 42})", ExperimentKind::classical);
    const auto &mc = std::get<qcat::MonteCarloSampler>(plan.sampler);
    EXPECT_EQ(mc.samples, 1000u);
    EXPECT_EQ(mc.seed, 42u);
    EXPECT_TRUE(plan.runs.empty());
}

TEST(Csv, EmptyIsHeaderOnly) {
    EXPECT_EQ(qcat::to_csv({}), std::string(qcat::kCsvHeader) + "\n");
    EXPECT_TRUE(qcat::parse_csv(qcat::to_csv({})).empty());
}

TEST(Csv, RoundTripIsExact) {
    std::vector<qcat::ResultRecord> recs;
    for (std::size_t J = 1; J <= 4; J++) {
        qcat::ResultRecord r;
        r.config_hash = "00ff00ff00ff00ff";
        r.N = 16;
        r.n = 2;
        r.I = 3;
        r.V = 0.1 * static_cast<double>(J);
        r.R = 16;
        r.J = J;
        r.S_nats = std::log(4.0) * J / 3.0;
        r.method = "direct";
        r.walltime_s = 0.0;
        recs.push_back(r);
    }
    auto back = qcat::parse_csv(qcat::to_csv(recs));
    ASSERT_EQ(back.size(), recs.size());
    for (std::size_t i = 0; i < recs.size(); i++) {
        auto expect = recs[i];
        expect.workers = back[i].workers;
        EXPECT_EQ(back[i], expect);
    }
    auto with_bits = qcat::to_csv(recs, {false, true});
    EXPECT_NE(with_bits.find(",S_bits\n"), std::string::npos);
    EXPECT_EQ(qcat::parse_csv(with_bits).size(), recs.size());
    EXPECT_THROW(qcat::parse_csv("a,b\n"), std::runtime_error);
}

TEST(Csv, WallTimesOnlyWhenAsked) {
    qcat::ResultRecord r;
    r.config_hash = "x";
    r.walltime_s = 1.5;
    r.method = "direct";
    EXPECT_NE(qcat::to_csv({r}).find(",direct,0\n"), std::string::npos);
    EXPECT_NE(qcat::to_csv({r}, {true, false}).find(",direct,1.5\n"), std::string::npos);
}

TEST(PlotScript, LabelsAndCsvReference) {
    auto plan = plan_of(R"({"N": 16, "J_max": 3})", ExperimentKind::single_cat);
    auto result = qcat::run_single(plan);
    auto text = qcat::plot_script(result.records, ExperimentKind::single_cat, "single_cat.csv");
    EXPECT_NE(text.find("set xlabel 'J'"), std::string::npos);
    EXPECT_NE(text.find("set ylabel 'S(J) [nats]'"), std::string::npos);
    EXPECT_NE(text.find("'single_cat.csv'"), std::string::npos);
    EXPECT_NE(text.find("2*log(16)"), std::string::npos);
    EXPECT_NE(text.find("KS slope"), std::string::npos);
}

TEST(Runs, SingleRowsRespectCeiling) {
    auto plan = plan_of(R"({"N_list": [16, 32], "J_max": 5})", ExperimentKind::single_cat);
    auto result = qcat::run_single(plan);
    EXPECT_TRUE(result.checks.at("ceiling_2lnN"));
    std::size_t classical = 0;
    for (const auto &r : result.records) {
        if (r.method == "classical") {
            classical++;
        } else {
            EXPECT_LE(r.S_nats, 2.0 * std::log(static_cast<double>(r.N)) + 1e-8);
        }
        if (r.N == 16 && r.J == 5) {
            EXPECT_NEAR(r.S_nats, 8.0 * std::log(2.0), 0.3);
        }
    }
    EXPECT_EQ(classical, 5u);
    EXPECT_EQ(result.records.size(), 15u);
}

TEST(Runs, SweepVDecoupledColumnMatchesSingleParticle) {
    auto plan = plan_of(R"({"V_list": [0, 1, 8], "J_max": 4})", ExperimentKind::sweep_V);
    auto result = qcat::run_sweep_V(plan);
    EXPECT_TRUE(result.checks.at("grid_complete"));
    EXPECT_EQ(result.records.size(), 12u);
    auto single = qcat::entropy_series(plan_of(R"({"N": 16})", ExperimentKind::single_cat).runs[0].config, 4,
                                       qcat::Method::direct);
    for (const auto &r : result.records) {
        if (r.V == 0.0) {
            EXPECT_NEAR(r.S_nats, single.points[r.J - 1].S, 1e-8);
        }
    }
    EXPECT_TRUE(result.diagnostics.count("plateau_diagnostic"));
}

TEST(Runs, SweepIOrdering) {
    auto plan = plan_of(R"({"J_max": 6})", ExperimentKind::sweep_I);
    auto result = qcat::run_sweep_I(plan);
    EXPECT_TRUE(result.checks.at("nondecreasing_in_I"));
    EXPECT_TRUE(result.checks.at("I1_exceeds_V0"));
    EXPECT_TRUE(result.checks.at("ceiling_2lnDim"));
    EXPECT_EQ(result.records.size(), 24u);
}

TEST(Runs, TruncationIsReportedNotFatal) {
    auto plan = plan_of(R"({"N": 16, "J_max": 6, "budget": {"max_words": 64}})", ExperimentKind::multi_cat);
    auto result = qcat::run_multi(plan);
    EXPECT_EQ(result.records.size(), 3u);
    ASSERT_EQ(result.truncations.size(), 1u);
    auto meta = qcat::run_metadata(plan, result, 1, 0.0);
    EXPECT_TRUE(meta.at("truncated").get<bool>());
}

TEST(Runs, CsvIsBitIdenticalAcrossWorkerCounts) {
    auto plan = plan_of(R"({"N": 16, "I": 2, "V": 8, "J_max": 5})", ExperimentKind::multi_cat);
    auto ref = qcat::to_csv(qcat::run_multi(plan, 1).records);
    for (std::size_t w : {2u, 8u}) {
        EXPECT_EQ(qcat::to_csv(qcat::run_multi(plan, w).records), ref) << w;
    }
}

TEST(Runs, OutputFilesAndMetadata) {
    auto dir = std::filesystem::temp_directory_path() / "qcat_test_outputs";
    std::filesystem::remove_all(dir);
    auto plan = plan_of(R"({"V_list": [0, 4], "J_max": 2})", ExperimentKind::sweep_V);
    auto result = qcat::run_sweep_V(plan);
    qcat::emit_csv(result.records, dir / "sweep_V.csv");
    qcat::emit_plot_script(result.records, ExperimentKind::sweep_V, dir / "sweep_V.csv", dir / "sweep_V.gp");
    EXPECT_EQ(qcat::read_csv(dir / "sweep_V.csv").size(), 4u);
    EXPECT_TRUE(std::filesystem::exists(dir / "sweep_V.gp"));
    auto meta = qcat::run_metadata(plan, result, 1, 0.0);
    EXPECT_EQ(meta.at("V_grid").size(), 2u);
    EXPECT_EQ(meta.at("units"), "nats");
    EXPECT_EQ(meta.at("kind"), "sweep_V");
}
