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

#include "tsvflab/engine.hpp"
#include "tsvflab/tsvf.hpp"
#include "test_util.hpp"

using namespace tsvflab;

TEST_CASE("stage-1 projector weak values for both post-selections") {
    const CircuitSpec spec = preset_double_mzi(false);
    {
        const auto wv = projector_weak_values(tsv_at_probe(spec, "W1", "Rf"));
        CHECK(std::abs(wv[0].value - Complex(1.0)) < 1e-12);
        CHECK(std::abs(wv[1].value) < 1e-12);
        CHECK(std::abs(wv[0].value + wv[1].value - Complex(1.0)) < 1e-12);
    }
    {
        const auto wv = projector_weak_values(tsv_at_probe(spec, "W1", "Lf"));
        CHECK(std::abs(wv[0].value) < 1e-12);
        CHECK(std::abs(wv[1].value - Complex(1.0)) < 1e-12);
    }
}

TEST_CASE("stage-2 projector weak values show the interference exit") {
    const CircuitSpec spec = preset_double_mzi(false);
    const auto wv = projector_weak_values(tsv_at_probe(spec, "W2", "Rf"));
    CHECK(std::abs(wv[0].value) < 1e-12);        // dark arm L2
    CHECK(std::abs(wv[1].value - Complex(1.0)) < 1e-12); // exit arm R2
}

TEST_CASE("blocking the dark arm equalizes the stage-1 weak values") {
    const CircuitSpec spec = preset_double_mzi(true);
    const auto wv = projector_weak_values(tsv_at_probe(spec, "W1", "Rf"));
    CHECK(std::abs(wv[0].value - Complex(0.5)) < 1e-12);
    CHECK(std::abs(wv[1].value - Complex(0.5)) < 1e-12);
}

TEST_CASE("weak value of the identity is one; orthogonal boundaries fail") {
    const PathState pre = PathState::basis("a", "b", 0);
    const PathState post("a", "b", Complex(0.6, 0.0), Complex(0.0, 0.8));
    const TwoStateVector tsv{pre, post};
    CHECK(std::abs(weak_value(tsv, Mat2::identity()).value - Complex(1.0)) <
          1e-12);
    const TwoStateVector ortho{pre, PathState::basis("a", "b", 1)};
    CHECK_THROWS_AS(weak_value(ortho, Mat2::identity()),
                    UndefinedConditionalError);
}

TEST_CASE("projector weak values sum to one for random boundary states") {
    TrialRng rng(42);
    int checked = 0;
    while (checked < 1000) {
        const PathState pre = testing::random_state("a", "b", rng);
        const PathState post = testing::random_state("a", "b", rng);
        if (std::abs(inner_product(post, pre)) < 1e-6) {
            continue;
        }
        const auto wv = projector_weak_values(TwoStateVector{pre, post});
        REQUIRE(std::abs(wv[0].value + wv[1].value - Complex(1.0)) < 1e-12);
        ++checked;
    }
}

TEST_CASE("conditional probabilities at the boundaries") {
    const Observable obs = Observable::port_basis({"a", "b"});
    TrialRng rng(8);
    // Post-selection equal to an eigenstate (up to phase) retrodicts it.
    const PathState pre = testing::random_state("a", "b", rng);
    const PathState post("a", "b", std::polar(1.0, 0.7), 0.0);
    const TwoStateVector tsv{pre, post};
    CHECK(abl_probability(tsv, obs, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(abl_probability(tsv, obs, 1) == doctest::Approx(0.0).epsilon(1e-12));

    // Impossible post-selection for every intermediate outcome.
    const TwoStateVector degenerate{PathState::basis("a", "b", 0),
                                    PathState::basis("a", "b", 1)};
    CHECK_THROWS_AS(abl_probability(degenerate, obs, 0),
                    UndefinedConditionalError);
}

TEST_CASE("the preset retrodicts the measured arm with certainty") {
    const CircuitSpec spec = preset_double_mzi(false);
    const TwoStateVector tsv = tsv_at_probe(spec, "W1", "Rf");
    const Observable obs = Observable::port_basis({"L1", "R1"});
    CHECK(abl_probability(tsv, obs, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(abl_probability(tsv, obs, 0) +
                   abl_probability(tsv, obs, 1) - 1.0) < 1e-12);
}

TEST_CASE("conditional probabilities are normalized and time-symmetric") {
    const Observable obs = Observable::port_basis({"a", "b"});
    TrialRng rng(1234);
    for (int i = 0; i < 1000; ++i) {
        const PathState pre = testing::random_state("a", "b", rng);
        const PathState post = testing::random_state("a", "b", rng);
        double denom = 0.0;
        for (int j = 0; j < 2; ++j) {
            denom += std::norm(inner_product(post, obs.eigenbasis[j]) *
                               inner_product(obs.eigenbasis[j], pre));
        }
        if (denom <= 1e-12) {
            continue;
        }
        const TwoStateVector tsv{pre, post};
        const double p0 = abl_probability(tsv, obs, 0);
        const double p1 = abl_probability(tsv, obs, 1);
        REQUIRE(std::abs(p0 + p1 - 1.0) < 1e-12);
        // Swapping the boundary states leaves the formula invariant.
        const TwoStateVector swapped{post, pre};
        REQUIRE(std::abs(abl_probability(swapped, obs, 0) - p0) < 1e-12);
    }
}

TEST_CASE("conditional frequencies of a complete intermediate measurement "
          "reproduce the time-symmetric formula") {
    // Brute-force route: strong-collapse the intermediate observable and
    // count final outcomes, with a rotated final splitter so the
    // probabilities are not 0/1.
    CircuitSpec spec;
    spec.name = "rotated";
    spec.source_port = "L0";
    spec.stages.push_back(
        BeamSplitterElem{"B1", {"L0", "R0"}, {"L1", "R1"}, M_PI / 4.0});
    spec.stages.push_back(
        BeamSplitterElem{"B2", {"L1", "R1"}, {"Lf", "Rf"}, M_PI / 3.0});
    spec.final_basis = {"Lf", "Rf"};
    spec.validate();

    TrialRng rng(555);
    const std::size_t n = 100000;
    std::size_t count_j[2] = {0, 0};
    std::size_t count_j_and_rf[2] = {0, 0};
    const PathState mid = forward_state(spec, 1);
    for (std::size_t i = 0; i < n; ++i) {
        auto [j, collapsed] = strong_measure(mid, rng);
        const Complex amp_rf = transfer_amplitude(spec, collapsed.port(j), "Rf");
        const bool to_rf = rng.uniform01() < std::norm(amp_rf);
        ++count_j[j];
        count_j_and_rf[j] += to_rf ? 1 : 0;
    }
    const std::size_t n_rf = count_j_and_rf[0] + count_j_and_rf[1];
    const TwoStateVector tsv = tsv_at(spec, 1, "Rf");
    const Observable obs = Observable::port_basis({"L1", "R1"});
    for (int j = 0; j < 2; ++j) {
        const double predicted = abl_probability(tsv, obs, j);
        const double observed =
            static_cast<double>(count_j_and_rf[j]) / static_cast<double>(n_rf);
        const double se =
            std::sqrt(std::max(predicted * (1.0 - predicted), 1e-12) /
                      static_cast<double>(n_rf));
        REQUIRE(std::abs(observed - predicted) < 4.0 * se);
    }
}

TEST_CASE("post-selected pointer shifts: preset values and quadrature") {
    const CircuitSpec spec = preset_double_mzi(false);
    const PointerConfig cfg{0.1, 1.0};
    const Projector pi{"L1"};

    // Without post-selection the mean reading is g <psi|Pi|psi> = g/2.
    const PathState pre = forward_state(spec, 1);
    CHECK(expected_pointer_shift(pre, pi, cfg) ==
          doctest::Approx(0.05).epsilon(1e-12));

    // Post-selected on Rf the backward state is the L1 basis state, so the
    // conditional mean is exactly g at any strength.
    const TwoStateVector tsv = tsv_at_probe(spec, "W1", "Rf");
    const double shift = expected_pointer_shift(tsv, pi, cfg);
    CHECK(shift == doctest::Approx(cfg.g).epsilon(1e-12));
    CHECK(std::abs(shift - testing::shift_by_quadrature(
                               tsv.pre, tsv.post, 0, cfg)) < 1e-8);

    // Zero coupling, zero shift.
    CHECK(expected_pointer_shift(tsv, pi, PointerConfig{0.0, 1.0}) == 0.0);
}

TEST_CASE("post-selected pointer shifts match quadrature for generic states") {
    TrialRng rng(2026);
    for (int i = 0; i < 25; ++i) {
        const PathState pre = testing::random_state("a", "b", rng);
        const PathState post = testing::random_state("a", "b", rng);
        const TwoStateVector tsv{pre, post};
        for (double eps : {0.05, 0.3, 1.0}) {
            const PointerConfig cfg{eps, 1.0};
            double closed = 0.0;
            try {
                closed = expected_pointer_shift(tsv, Projector{"a"}, cfg);
            } catch (const UndefinedConditionalError &) {
                continue;
            }
            const double quad =
                testing::shift_by_quadrature(pre, post, 0, cfg);
            REQUIRE(std::abs(closed - quad) < 1e-8);
        }
    }
}

TEST_CASE("finite-strength corrections vanish quadratically in epsilon") {
    // A generic boundary pair with a nonzero second-order coefficient.
    const PathState pre =
        normalize(PathState("a", "b", Complex(0.8, 0.1), Complex(0.55, -0.2)));
    const PathState post =
        normalize(PathState("a", "b", Complex(0.3, -0.4), Complex(0.7, 0.3)));
    const TwoStateVector tsv{pre, post};
    const Projector pi{"a"};
    const double weak_limit_per_g = weak_value(tsv, Mat2::diag(1.0, 0.0))
                                        .value.real();

    std::vector<double> log_eps;
    std::vector<double> log_err;
    for (double eps : {0.02, 0.05, 0.1, 0.2}) {
        const PointerConfig cfg{eps, 1.0};
        const double shift = expected_pointer_shift(tsv, pi, cfg);
        const double rel_err = std::abs(shift / cfg.g - weak_limit_per_g);
        REQUIRE(rel_err > 0.0);
        log_eps.push_back(std::log(eps));
        log_err.push_back(std::log(rel_err));
    }
    // Least-squares slope of log-error vs log-epsilon.
    const auto n = static_cast<double>(log_eps.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < log_eps.size(); ++i) {
        sx += log_eps[i];
        sy += log_err[i];
        sxx += log_eps[i] * log_eps[i];
        sxy += log_eps[i] * log_err[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= 1.8);
}

TEST_CASE("dark-port leakage: closed form, density route and Monte Carlo") {
    CHECK(leakage_probability(PointerConfig{0.0, 1.0}) == 0.0);
    CHECK(leakage_probability(PointerConfig{1000.0, 1.0}) ==
          doctest::Approx(0.5).epsilon(1e-12));

    const PointerConfig cfg{0.1, 1.0};
    const double closed = leakage_probability(cfg);
    CHECK(closed == doctest::Approx((1.0 - std::exp(-0.00125)) / 2.0)
                        .epsilon(1e-12));

    // Independent route: exact density-matrix propagation with the probe
    // acting as a dephasing channel.
    const CircuitSpec spec = preset_double_mzi(false, cfg);
    CHECK(std::abs(exact_port_occupancy(spec, "L2") - closed) < 1e-12);

    // Monte Carlo frequency of actually finding the photon on the dark arm.
    TrialRng rng(987654);
    const std::size_t n = 10000000;
    const PathState stage1 = forward_state(spec, 1);
    const Mat2 bs2 = bs_matrix(M_PI / 4.0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = sample_reading_q(cfg, 0.5, rng);
        const PathState collapsed =
            collapse_update(stage1, Projector{"L1"}, cfg, q);
        const PathState stage2 = apply_unitary(bs2, collapsed);
        hits += rng.uniform01() < std::norm(stage2.amp(0)) ? 1 : 0;
    }
    const double freq = static_cast<double>(hits) / static_cast<double>(n);
    const double se = std::sqrt(closed * (1.0 - closed) / n);
    CHECK(std::abs(freq - closed) < 4.0 * se);
}

TEST_CASE("the exact density picture dephases the probed stage") {
    const PointerConfig cfg{0.1, 1.0};
    const CircuitSpec spec = preset_double_mzi(false, cfg);
    const Mat2 rho = propagate_density_exact(spec, 2); // after the probe
    CHECK(std::abs(rho.at(0, 0).real() - 0.5) < 1e-12);
    CHECK(std::abs(std::abs(rho.at(0, 1)) -
                   decoherence_factor(cfg) * 0.5) < 1e-12);
    // Trace is preserved without blocks.
    CHECK(std::abs((rho.at(0, 0) + rho.at(1, 1)).real() - 1.0) < 1e-12);
}

TEST_CASE("fully blocked post-selections are reported as undefined") {
    // theta = 0 keeps the photon on its arm, so blocking that arm makes
    // any post-selection behind the block unreachable.
    CircuitSpec spec;
    spec.name = "dead_end";
    spec.source_port = "L0";
    spec.stages.push_back(
        BeamSplitterElem{"B1", {"L0", "R0"}, {"L1", "R1"}, 0.0});
    spec.stages.push_back(BlockElem{{"L1", "R1"}, 0});
    spec.stages.push_back(
        BeamSplitterElem{"B2", {"L1", "R1"}, {"Lf", "Rf"}, 0.0});
    spec.final_basis = {"Lf", "Rf"};
    spec.validate();
    CHECK_THROWS_AS(tsv_at(spec, 1, "Lf"), UndefinedConditionalError);
}
