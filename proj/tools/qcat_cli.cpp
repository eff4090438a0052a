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


// qcat: entropy experiments for the quantized cat map.

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcat/qcat.hpp"

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    std::size_t workers = 1;
    bool heavy = false;
    std::string method;
    std::optional<std::uint64_t> seed;
    bool timing = false;
    bool bits = false;
    bool resume = false;
};

qcat::ExperimentPlan load_plan(const Options &o, qcat::ExperimentKind kind) {
    nlohmann::json doc = nlohmann::json::object();
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) {
            throw qcat::config_error("config: cannot open " + o.config);
        }
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error &e) {
            throw qcat::config_error(std::string("config: malformed JSON: ") + e.what());
        }
    }
    if (!o.method.empty()) {
        doc["method"] = o.method;
    }
    if (o.seed) {
        doc["seed"] = *o.seed;
    }
    auto plan = qcat::parse_config(doc, kind, o.heavy);
    plan.out_dir = o.out;
    return plan;
}

int run(const Options &o, qcat::ExperimentKind kind) {
    auto plan = load_plan(o, kind);
    std::filesystem::create_directories(plan.out_dir);
    const auto start = std::chrono::steady_clock::now();
    auto result = qcat::run_plan(plan, o.workers, o.resume);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string stem = qcat::to_string(kind);
    auto csv = plan.out_dir / (stem + ".csv");
    qcat::emit_csv(result.records, csv, {o.timing, o.bits});
    qcat::emit_plot_script(result.records, kind, csv, plan.out_dir / (stem + ".gp"));
    std::ofstream meta(plan.out_dir / (stem + ".meta.json"));
    meta << qcat::run_metadata(plan, result, o.workers, wall).dump(2) << "\n";

    std::cout << "wrote " << result.records.size() << " rows to " << csv.string() << "\n";
    for (const auto &t : result.truncations) {
        std::cerr << "truncated: " << t << "\n";
    }
    for (const auto &[name, value] : result.diagnostics) {
        std::cout << "  " << name << " = " << value << "\n";
    }
    for (const auto &[name, ok] : result.checks) {
        std::cout << "  check " << name << ": " << (ok ? "ok" : "VIOLATED") << "\n";
    }
    return 0;
}

int validate(const Options &o) {
    if (o.config.empty()) {
        throw qcat::config_error("validate needs --config");
    }
    std::ifstream in(o.config);
    if (!in) {
        throw qcat::config_error("config: cannot open " + o.config);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw qcat::config_error(std::string("config: malformed JSON: ") + e.what());
    }
    auto kind = doc.contains("kind") && doc.at("kind").is_string() ? qcat::parse_kind(doc.at("kind").get<std::string>())
                                                                  : qcat::ExperimentKind::single_cat;
    auto plan = qcat::parse_config(doc, kind, o.heavy);
    std::cout << "ok: " << qcat::to_string(kind) << ", " << plan.runs.size() << " run(s)\n";
    for (const auto &r : plan.runs) {
        std::cout << "  " << r.role << " hash=" << r.config.hash_hex() << " dim=" << r.config.shape().total()
                  << " J_max=" << r.J_max << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Entropies of quantum histories for the quantized cat map"};
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App *sub) {
        sub->add_option("--config", o.config, "JSON configuration");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--heavy", o.heavy, "unlock the heavy tier");
        sub->add_option("--method", o.method, "direct|omega|auto")
            ->check(CLI::IsMember({"direct", "omega", "auto"}));
        sub->add_option("--seed", o.seed, "Monte Carlo seed");
        sub->add_flag("--timing", o.timing, "write measured wall times to the CSV");
        sub->add_flag("--bits", o.bits, "append an S_bits column");
        sub->add_flag("--resume", o.resume, "continue from checkpoints in <out>/checkpoints");
    };
    struct Sub {
        const char *name;
        const char *help;
        qcat::ExperimentKind kind;
    };
    const Sub subs[] = {{"single", "single-particle S(J) for several N", qcat::ExperimentKind::single_cat},
                        {"multi", "one multi-particle configuration", qcat::ExperimentKind::multi_cat},
                        {"classical", "classical cylinder entropies", qcat::ExperimentKind::classical},
                        {"sweep-v", "S(J, V) over a V grid", qcat::ExperimentKind::sweep_V},
                        {"sweep-i", "S(J) for I = 1, 2, 3", qcat::ExperimentKind::sweep_I}};
    std::optional<qcat::ExperimentKind> chosen;
    for (const auto &s : subs) {
        auto *sub = app.add_subcommand(s.name, s.help);
        common(sub);
        sub->callback([&chosen, kind = s.kind] { chosen = kind; });
    }
    auto *val = app.add_subcommand("validate", "check a configuration without running it");
    common(val);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (val->parsed()) {
            return validate(o);
        }
        return run(o, *chosen);
    } catch (const qcat::config_error &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qcat::budget_error &e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const qcat::numeric_error &e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
