// Copyright 2026 The tsvflab Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "tsvflab/dsl.hpp"
#include "tsvflab/output.hpp"
#include "test_util.hpp"

using namespace tsvflab;

namespace {

std::string load_experiment_file(const std::string &name) {
    return read_file(testing::experiments_dir() + "/" + name);
}

ExperimentAst parse_ok(const std::string &text) {
    const ParseResult result = parse(text);
    if (!result.ok()) {
        for (const auto &d : result.diagnostics) {
            MESSAGE(d.line << ":" << d.col << ": " << d.message);
        }
    }
    REQUIRE(result.ok());
    return *result.ast;
}

/// Random structurally-valid experiment for round-trip checks.
ExperimentAst random_ast(TrialRng &rng) {
    ExperimentAst ast;
    ast.name = "exp_" + std::to_string(rng.next_u64() % 100000);
    const int n_bs = 1 + static_cast<int>(rng.uniform01() * 3.0);
    int port_counter = 0;
    auto fresh = [&port_counter]() {
        return "p" + std::to_string(port_counter++);
    };
    const std::string source = fresh();
    ast.elements.push_back(AstSource{source, 1, 1});
    std::array<std::string, 2> frontier{source, fresh()};
    int probe_counter = 0;
    for (int b = 0; b < n_bs; ++b) {
        AstBeamSplitter bs;
        bs.name = "B" + std::to_string(b);
        bs.in = frontier;
        bs.out = {fresh(), fresh()};
        if (rng.uniform01() < 0.5) {
            bs.theta = 0.25 * M_PI * (0.5 + rng.uniform01());
        }
        frontier = bs.out;
        ast.elements.push_back(bs);
        if (rng.uniform01() < 0.7) {
            AstProbe probe;
            probe.id = "P" + std::to_string(probe_counter++);
            probe.port = frontier[rng.uniform01() < 0.5 ? 0 : 1];
            probe.strength = rng.uniform01();
            if (rng.uniform01() < 0.5) {
                probe.width = 0.5 + rng.uniform01();
            }
            ast.elements.push_back(probe);
        }
        if (rng.uniform01() < 0.2) {
            ast.elements.push_back(
                AstBlock{frontier[rng.uniform01() < 0.5 ? 0 : 1], 1, 1});
        }
    }
    ast.elements.push_back(AstDetect{frontier, 1, 1});
    if (rng.uniform01() < 0.8) {
        AstRun run;
        run.trials = 1 + static_cast<std::int64_t>(rng.uniform01() * 10000);
        run.seed = rng.next_u64();
        if (rng.uniform01() < 0.3) {
            run.cycles = 1 + static_cast<std::int64_t>(rng.uniform01() * 100);
        }
        if (rng.uniform01() < 0.3) {
            run.subsample = 0.05 + 0.9 * rng.uniform01();
        }
        ast.run = run;
    }
    return ast;
}

std::string random_token_soup(TrialRng &rng) {
    static const char *tokens[] = {
        "experiment", "source",  "beamsplitter", "probe",  "block",
        "detect",     "run",     "trials",       "seed",   "cycles",
        "subsample",  "theta",   "strength",     "width",  "on",
        "{",          "}",       "(",            ")",      ",",
        ";",          "->",      "L0",           "Rf",     "W1",
        "0.5",        "1e9",     "-3",           "#x",     "\n",
    };
    std::string out;
    const int n = static_cast<int>(rng.uniform01() * 40.0);
    for (int i = 0; i < n; ++i) {
        out += tokens[rng.next_u64() % std::size(tokens)];
        out += rng.uniform01() < 0.7 ? " " : "";
    }
    return out;
}

std::string random_bytes(TrialRng &rng) {
    const int n = static_cast<int>(rng.uniform01() * 64.0);
    std::string out;
    for (int i = 0; i < n; ++i) {
        out += static_cast<char>(rng.next_u64() & 0xFF);
    }
    return out;
}

} // namespace

TEST_CASE("the bundled double interferometer file lowers to the preset") {
    const ExperimentAst ast = parse_ok(load_experiment_file("double_mzi.exp"));
    const LowerResult lowered = lower(ast);
    REQUIRE(lowered.ok());
    const CircuitSpec expected =
        preset_double_mzi(false, PointerConfig{0.1, 1.0});
    CHECK(lowered.spec->canonical_description() ==
          expected.canonical_description());
    CHECK(lowered.run.trials == 100000);
    CHECK(lowered.run.seed == 42);
    CHECK(!lowered.run.cycles.has_value());

    // Count structure: three splitters, two probes.
    int n_bs = 0;
    int n_probes = 0;
    for (const auto &stage : lowered.spec->stages) {
        n_bs += std::holds_alternative<BeamSplitterElem>(stage) ? 1 : 0;
        n_probes += std::holds_alternative<ProbeElem>(stage) ? 1 : 0;
    }
    CHECK(n_bs == 3);
    CHECK(n_probes == 2);
}

TEST_CASE("the blocked variant lowers to the blocked preset") {
    const ExperimentAst ast = parse_ok(load_experiment_file("blocked.exp"));
    const LowerResult lowered = lower(ast);
    REQUIRE(lowered.ok());
    CHECK(lowered.spec->has_block());
    CircuitSpec expected = preset_double_mzi(true, PointerConfig{0.1, 1.0});
    expected.name = "blocked";
    CHECK(lowered.spec->canonical_description() ==
          expected.canonical_description());
}

TEST_CASE("the cyclic and strong variants carry their run configuration") {
    const LowerResult cyc =
        lower(parse_ok(load_experiment_file("single_photon.exp")));
    REQUIRE(cyc.ok());
    CHECK(cyc.run.cycles.value() == 10000);
    CHECK(cyc.run.trials == 1);

    const LowerResult strong =
        lower(parse_ok(load_experiment_file("strong_limit.exp")));
    REQUIRE(strong.ok());
    const auto probes = strong.spec->probes();
    REQUIRE(probes.size() == 1);
    CHECK(probes[0]->cfg.g == 10.0);
    CHECK(probes[0]->cfg.sigma == 1.0);
}

TEST_CASE("an undeclared port is reported with its position") {
    const std::string text = "experiment bad {\n"
                             "  source L0;\n"
                             "  beamsplitter B1 (L0, R0) -> (L1, R1);\n"
                             "  probe W1 on Lx strength 0.1;\n"
                             "  detect (L1, R1);\n"
                             "}\n";
    const ParseResult result = parse(text);
    REQUIRE(!result.ok());
    bool found = false;
    for (const auto &d : result.diagnostics) {
        if (d.message.find("Lx") != std::string::npos) {
            found = true;
            CHECK(d.line == 4);
            CHECK(d.col >= 1);
        }
    }
    CHECK(found);
}

TEST_CASE("malformed statements produce positioned errors, not crashes") {
    for (const char *text : {
             "experiment x { source ; }",
             "experiment x { beamsplitter (a,b) -> (c,d); }",
             "experiment x { run { trials 0 seed 1 } }",
             "experiment x { run { trials 10 seed -4 } }",
             "experiment x { run { trials 10 seed 1 } run { trials 1 seed 1 } }",
             "experiment x { source L0; beamsplitter B (L0,R0) -> (L1,R1) "
             "theta 9; detect (L1,R1); }",
             "experiment x { source L0; detect (L0,R0); }",
             "experiment x { source L0; beamsplitter B (L0,R0) -> (L1,R1); "
             "detect (L1,R9); }",
             "experiment x { source L0; beamsplitter B (L0,R0) -> (L1,L1); "
             "detect (L1,R1); }",
             "experiment x { source L0; probe W on L0 strength 0.1; }",
             "experiment x {} trailing",
             "experiment x { source L0; beamsplitter B (L0,R0) -> (L1,R1); "
             "probe W on L1 strength 0.1 width 0; detect (L1,R1); }",
         }) {
        const ParseResult result = parse(text);
        CHECK(!result.ok());
        REQUIRE(!result.diagnostics.empty());
    }
}

TEST_CASE("serialization round-trips the bundled files") {
    for (const char *name : {"double_mzi.exp", "blocked.exp",
                             "single_photon.exp", "strong_limit.exp"}) {
        const ExperimentAst ast = parse_ok(load_experiment_file(name));
        const std::string text = serialize(ast);
        const ExperimentAst again = parse_ok(text);
        CHECK(again == ast);
        CHECK(serialize(again) == text); // idempotent canonical form
    }
}

TEST_CASE("serialization round-trips randomly generated experiments") {
    TrialRng rng(20261111);
    for (int i = 0; i < 1000; ++i) {
        const ExperimentAst ast = random_ast(rng);
        const std::string text = serialize(ast);
        const ParseResult reparsed = parse(text);
        REQUIRE(reparsed.ok());
        REQUIRE(*reparsed.ast == ast);
    }
}

TEST_CASE("random valid experiments lower to valid circuits") {
    TrialRng rng(555777);
    for (int i = 0; i < 200; ++i) {
        const ExperimentAst ast = random_ast(rng);
        const LowerResult lowered = lower(ast);
        REQUIRE(lowered.ok());
        lowered.spec->validate();
    }
}

TEST_CASE("the parser is total on arbitrary bytes") {
    TrialRng rng(424242);
    for (int i = 0; i < 20000; ++i) {
        const std::string text =
            rng.uniform01() < 0.5 ? random_bytes(rng) : random_token_soup(rng);
        ParseResult result;
        REQUIRE_NOTHROW(result = parse(text));
        if (!result.ok()) {
            REQUIRE(!result.diagnostics.empty());
        }
        // Positions stay inside the input.
        std::size_t lines = 1;
        for (char c : text) {
            lines += c == '\n' ? 1 : 0;
        }
        for (const auto &d : result.diagnostics) {
            REQUIRE(d.line >= 1);
            REQUIRE(static_cast<std::size_t>(d.line) <= lines);
            REQUIRE(d.col >= 1);
        }
    }
}

TEST_CASE("lowered probes default to unit width and 50:50 splitters") {
    const ExperimentAst ast = parse_ok(
        "experiment defaults {\n"
        "  source L0;\n"
        "  beamsplitter B1 (L0, R0) -> (L1, R1);\n"
        "  probe W1 on L1 strength 0.2;\n"
        "  detect (L1, R1);\n"
        "}\n");
    const LowerResult lowered = lower(ast);
    REQUIRE(lowered.ok());
    const auto probes = lowered.spec->probes();
    REQUIRE(probes.size() == 1);
    CHECK(probes[0]->cfg.sigma == 1.0);
    const auto &bs = std::get<BeamSplitterElem>(lowered.spec->stages[0]);
    CHECK(bs.theta == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
    // Defaults are absent from the canonical text, present after lowering.
    CHECK(serialize(ast).find("width") == std::string::npos);
    CHECK(serialize(ast).find("theta") == std::string::npos);
}
