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

#include "tsvflab/circuit.hpp"
#include "tsvflab/linalg.hpp"
#include "tsvflab/rng.hpp"
#include "test_util.hpp"

using namespace tsvflab;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("identity leaves a basis state untouched") {
    const PathState psi = PathState::basis("a", "b", 0);
    const PathState out = apply_unitary(Mat2::identity(), psi);
    CHECK(std::abs(out.amp(0) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(out.amp(1)) < 1e-15);
}

TEST_CASE("a 50:50 splitter maps a basis state to an equal superposition") {
    const PathState psi = PathState::basis("a", "b", 0);
    const PathState out = apply_unitary(bs_matrix(0.25 * M_PI), psi);
    CHECK(std::abs(out.amp(0) - Complex(kInvSqrt2, 0.0)) < 1e-12);
    CHECK(std::abs(out.amp(1) - Complex(0.0, kInvSqrt2)) < 1e-12);
}

TEST_CASE("two successive 50:50 splitters swap the ports with a phase") {
    // Hand product: ([[1,i],[i,1]]/sqrt(2))^2 = [[0,i],[i,0]].
    const Mat2 bs = bs_matrix(0.25 * M_PI);
    PathState psi = PathState::basis("a", "b", 0);
    psi = apply_unitary(bs, psi);
    psi = apply_unitary(bs, psi);
    CHECK(std::abs(psi.amp(0)) < 1e-12);
    CHECK(std::abs(psi.amp(1) - Complex(0.0, 1.0)) < 1e-12);
}

TEST_CASE("apply_unitary rejects a matrix with a visible unitarity defect") {
    Mat2 bad = bs_matrix(0.25 * M_PI);
    bad.at(0, 0) += Complex(1e-6, 0.0);
    const PathState psi = PathState::basis("a", "b", 0);
    CHECK_THROWS_AS(apply_unitary(bad, psi), ValidationError);
}

TEST_CASE("inner products") {
    const PathState e0 = PathState::basis("a", "b", 0);
    const PathState e1 = PathState::basis("a", "b", 1);
    const PathState sup("a", "b", kInvSqrt2, Complex(0.0, kInvSqrt2));
    CHECK(std::abs(inner_product(e0, e0) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(inner_product(e0, e1)) < 1e-15);
    CHECK(std::abs(inner_product(e0, sup) - Complex(kInvSqrt2, 0.0)) < 1e-15);
    // Conjugate-linear in the first argument.
    CHECK(std::abs(inner_product(sup, e0) -
                   std::conj(inner_product(e0, sup))) < 1e-15);
}

TEST_CASE("inner product requires matching port labels") {
    const PathState a = PathState::basis("a", "b", 0);
    const PathState c = PathState::basis("a", "c", 0);
    CHECK_THROWS_AS(inner_product(a, c), ValidationError);
}

TEST_CASE("normalize") {
    const PathState doubled("a", "b", 2.0, 0.0);
    const PathState unit = normalize(doubled);
    CHECK(std::abs(unit.amp(0) - Complex(1.0)) < 1e-15);

    const PathState diag("a", "b", 1.0, 1.0);
    const PathState out = normalize(diag);
    CHECK(std::abs(out.amp(0) - Complex(kInvSqrt2, 0.0)) < 1e-15);
    CHECK(std::abs(out.amp(1) - Complex(kInvSqrt2, 0.0)) < 1e-15);
    CHECK(out.norm2() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(normalize(PathState("a", "b", 0.0, 0.0)), NullBranchError);
}

TEST_CASE("path states validate their labels and amplitudes") {
    CHECK_THROWS_AS(PathState("a", "a", 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(PathState("a", "b", Complex(std::nan(""), 0.0), 0.0),
                    ValidationError);
}

TEST_CASE("norm is conserved by random splitter/phase products") {
    TrialRng rng(20260314);
    for (int i = 0; i < 1000; ++i) {
        Mat2 u = bs_matrix(rng.uniform01() * 0.5 * M_PI);
        u = u *
            PhaseShiftElem{{"a", "b"}, 0, rng.uniform01() * 2.0 * M_PI}.matrix();
        u = u * bs_matrix(rng.uniform01() * 0.5 * M_PI);
        const PathState psi = testing::random_state("a", "b", rng);
        const PathState out = apply_unitary(u, psi);
        REQUIRE(std::abs(out.norm2() - psi.norm2()) < 1e-12);
    }
}

TEST_CASE("self inner product is real and nonnegative") {
    TrialRng rng(7);
    for (int i = 0; i < 200; ++i) {
        const PathState psi = testing::random_state("a", "b", rng);
        const Complex self = inner_product(psi, psi);
        REQUIRE(self.imag() == 0.0);
        REQUIRE(self.real() >= 0.0);
    }
}

TEST_CASE("projectors are idempotent and yield eigenstates after normalize") {
    const Projector pi{"a"};
    TrialRng rng(11);
    for (int i = 0; i < 200; ++i) {
        const PathState psi = testing::random_state("a", "b", rng);
        const Mat2 p = pi.matrix_for(psi);
        const Mat2 pp = p * p;
        for (int k = 0; k < 4; ++k) {
            REQUIRE(pp.m[k] == p.m[k]); // exact idempotence
        }
        const PathState projected = project(pi, psi);
        if (projected.norm2() < 1e-20) {
            continue;
        }
        const PathState eigen = normalize(projected);
        const PathState again = project(pi, eigen);
        REQUIRE(std::abs(inner_product(eigen, again) - Complex(1.0)) < 1e-12);
    }
}
