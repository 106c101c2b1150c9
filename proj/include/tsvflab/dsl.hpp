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

/**
 * @file
 * Text format for experiment definitions. Line-oriented, `#` comments:
 *
 *   experiment <ident> {
 *     source <port> ;
 *     beamsplitter <ident> (<p>,<p>) -> (<p>,<p>) [theta <float>] ;
 *     probe <ident> on <port> strength <float> [width <float>] ;
 *     block <port> ;
 *     detect (<p>,<p>) ;
 *     run { trials <int> seed <int> [cycles <int>] [subsample <float>] }
 *   }
 *
 * `strength` is the pointer coupling g, `width` the pointer sigma (default
 * 1), both in pointer-position units; a beam splitter without `theta` is
 * 50:50. The parser never throws on arbitrary input: it reports
 * diagnostics with positions instead.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsvflab/circuit.hpp"

namespace tsvflab {

struct ParseDiagnostic {
    int line = 1; // 1-based
    int col = 1;  // 1-based
    std::string message;
    enum class Severity { Error, Warning } severity = Severity::Error;
};

struct AstSource {
    std::string port;
    int line = 1, col = 1;

    bool operator==(const AstSource &o) const { return port == o.port; }
};

struct AstBeamSplitter {
    std::string name;
    std::array<std::string, 2> in;
    std::array<std::string, 2> out;
    std::optional<double> theta;
    int line = 1, col = 1;

    bool operator==(const AstBeamSplitter &o) const {
        return name == o.name && in == o.in && out == o.out && theta == o.theta;
    }
};

struct AstProbe {
    std::string id;
    std::string port;
    double strength = 0.0;
    std::optional<double> width;
    int line = 1, col = 1;

    bool operator==(const AstProbe &o) const {
        return id == o.id && port == o.port && strength == o.strength &&
               width == o.width;
    }
};

struct AstBlock {
    std::string port;
    int line = 1, col = 1;

    bool operator==(const AstBlock &o) const { return port == o.port; }
};

struct AstDetect {
    std::array<std::string, 2> ports;
    int line = 1, col = 1;

    bool operator==(const AstDetect &o) const { return ports == o.ports; }
};

using AstElement =
    std::variant<AstSource, AstBeamSplitter, AstProbe, AstBlock, AstDetect>;

struct AstRun {
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> cycles;
    std::optional<double> subsample;
    int line = 1, col = 1;

    bool operator==(const AstRun &o) const {
        return trials == o.trials && seed == o.seed && cycles == o.cycles &&
               subsample == o.subsample;
    }
};

struct ExperimentAst {
    std::string name;
    std::vector<AstElement> elements;
    std::optional<AstRun> run;

    bool operator==(const ExperimentAst &o) const {
        if (name != o.name || run != o.run ||
            elements.size() != o.elements.size()) {
            return false;
        }
        for (std::size_t i = 0; i < elements.size(); ++i) {
            const bool same = std::visit(
                [&](const auto &a) {
                    using T = std::decay_t<decltype(a)>;
                    const T *b = std::get_if<T>(&o.elements[i]);
                    return b != nullptr && a == *b;
                },
                elements[i]);
            if (!same) {
                return false;
            }
        }
        return true;
    }
};

struct ParseResult {
    std::optional<ExperimentAst> ast;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return ast.has_value(); }
};

/// Parses and validates an experiment definition. Total on arbitrary
/// bytes: returns either a validate-clean AST or at least one positioned
/// diagnostic, never throws.
ParseResult parse(std::string_view text);

/// Canonical text form; parse(serialize(ast)) is structurally equal to ast
/// for valid ASTs.
std::string serialize(const ExperimentAst &ast);

struct RunConfig {
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    std::optional<std::size_t> cycles;
    std::optional<double> subsample;
};

struct LowerResult {
    std::optional<CircuitSpec> spec;
    RunConfig run;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return spec.has_value(); }
};

/// Produces a validated CircuitSpec plus run configuration from an AST.
LowerResult lower(const ExperimentAst &ast);

} // namespace tsvflab
