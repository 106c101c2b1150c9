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

#include <algorithm>
#include <cmath>
#include <set>

#include "tsvflab/slicing.hpp"
#include "test_util.hpp"

using namespace tsvflab;

namespace {

const PointerConfig kWeak{0.1, 1.0};

const EnsembleResult &weak_run() {
    static const EnsembleResult r =
        run_ensemble(preset_double_mzi(false, kWeak), 100000, 42, 4);
    return r;
}

int slice_index(const SliceReport &report, const std::string &label) {
    for (std::size_t i = 0; i < report.slice_labels.size(); ++i) {
        if (report.slice_labels[i] == label) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

} // namespace

TEST_CASE("slicing partitions the non-absorbed trials") {
    const EnsembleResult r =
        run_ensemble(preset_double_mzi(true, PointerConfig{0.5, 1.0}), 20000,
                     7);
    const Slices by_final = slice(r, SliceCriterion::final_port());
    std::size_t total = 0;
    std::set<std::size_t> seen;
    for (const auto &bucket : by_final.trial_indices) {
        for (std::size_t idx : bucket) {
            REQUIRE(seen.insert(idx).second); // disjoint
            REQUIRE(!r.trials[idx].absorbed());
        }
        total += bucket.size();
    }
    CHECK(total == by_final.total);
    CHECK(by_final.total + by_final.absorbed == r.trials.size());
    CHECK(by_final.absorbed == r.absorbed_count);

    // A custom criterion induces a partition too.
    const Slices parity = slice(
        r, SliceCriterion::custom("seed_parity", [](const TrialRecord &t) {
            return t.seed % 2 == 0 ? "even" : "odd";
        }));
    std::size_t parity_total = 0;
    for (const auto &bucket : parity.trial_indices) {
        parity_total += bucket.size();
    }
    CHECK(parity_total == by_final.total);
}

TEST_CASE("an unreachable final port shows up as a flagged empty slice") {
    // theta = 0 splitters keep the photon on its arm, so Ra never fires.
    CircuitSpec spec;
    spec.name = "straight";
    spec.source_port = "L0";
    spec.stages.push_back(
        BeamSplitterElem{"B1", {"L0", "R0"}, {"La", "Ra"}, 0.0});
    spec.final_basis = {"La", "Ra"};
    spec.validate();
    const EnsembleResult r = run_ensemble(spec, 50, 3);
    const Slices slices = slice(r, SliceCriterion::final_port());
    const SliceReport report = slice_means(r, slices);
    const int ra = slice_index(report, "Ra");
    const int la = slice_index(report, "La");
    REQUIRE(ra >= 0);
    REQUIRE(la >= 0);
    CHECK(report.counts[ra] == 0);
    CHECK(report.counts[la] == 50);
    CHECK(std::any_of(report.flags.begin(), report.flags.end(),
                      [](const std::string &f) {
                          return f.find("empty slice") != std::string::npos;
                      }));
}

TEST_CASE("count-weighted slice means recover the unsliced mean") {
    const EnsembleResult &r = weak_run();
    const SliceReport report =
        slice_means(r, slice(r, SliceCriterion::final_port()));
    for (std::size_t p = 0; p < report.probe_ids.size(); ++p) {
        double weighted = 0.0;
        double unsliced = 0.0;
        std::size_t n = 0;
        for (std::size_t s = 0; s < report.slice_labels.size(); ++s) {
            weighted += report.stats[s][p].mean *
                        static_cast<double>(report.stats[s][p].count);
            n += report.stats[s][p].count;
        }
        for (const TrialRecord &t : r.trials) {
            if (t.readings[p]) {
                unsliced += *t.readings[p];
            }
        }
        REQUIRE(std::abs(weighted - unsliced) <
                1e-9 * static_cast<double>(n));
    }
}

TEST_CASE("slicing by the final port resurrects the which-path bias") {
    const EnsembleResult &r = weak_run();
    const SliceReport report =
        slice_means(r, slice(r, SliceCriterion::final_port()));
    const int rf = slice_index(report, "Rf");
    const int lf = slice_index(report, "Lf");
    const ProbeStats &w1_rf = report.stats[rf][0];
    const ProbeStats &w1_lf = report.stats[lf][0];
    // The conditional means sit at g and 0 exactly in this geometry.
    CHECK(std::abs(w1_rf.mean - kWeak.g) < 4.0 * w1_rf.std_error);
    CHECK(std::abs(w1_lf.mean - 0.0) < 4.0 * w1_lf.std_error);
    CHECK(report.z[0] > 10.0);
    // The dark-arm probe shows no bias in either slice.
    CHECK(std::abs(report.stats[rf][1].mean) <
          4.0 * report.stats[rf][1].std_error);
    CHECK(std::abs(report.stats[lf][1].mean) <
          4.0 * report.stats[lf][1].std_error);
    CHECK(report.z[1] < 4.0);
}

TEST_CASE("subsampling keeps a uniform seeded subset") {
    const EnsembleResult &r = weak_run();
    const EnsembleResult all = subsample(r, 1.0, 5);
    CHECK(all.trials.size() == r.trials.size());

    const EnsembleResult tenth = subsample(r, 0.1, 5);
    CHECK(tenth.trials.size() == 10000);
    CHECK(tenth.subsample.has_value());
    CHECK(tenth.subsample->fraction == 1.0 / 10.0);

    // Different seeds choose different subsets of the same parent.
    const EnsembleResult other = subsample(r, 0.1, 6);
    std::vector<std::uint64_t> ids_a;
    std::vector<std::uint64_t> ids_b;
    for (const auto &t : tenth.trials) ids_a.push_back(t.trial_id);
    for (const auto &t : other.trials) ids_b.push_back(t.trial_id);
    CHECK(ids_a != ids_b);
    // Reproducible for a fixed seed.
    const EnsembleResult redo = subsample(r, 0.1, 5);
    std::vector<std::uint64_t> ids_c;
    for (const auto &t : redo.trials) ids_c.push_back(t.trial_id);
    CHECK(ids_a == ids_c);

    CHECK_THROWS_AS(subsample(r, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(subsample(r, 1.5, 1), ValidationError);
}

TEST_CASE("a tenth of the data still resolves the sliced bias") {
    const EnsembleResult &r = weak_run();
    const EnsembleResult tenth = subsample(r, 0.1, 17);
    const SliceReport report =
        slice_means(tenth, slice(tenth, SliceCriterion::final_port()));
    CHECK(report.z[0] > 3.0);
}

TEST_CASE("match classes sit at chance for zero coupling") {
    const EnsembleResult r =
        run_ensemble(preset_double_mzi(false, PointerConfig{0.0, 1.0}), 20000,
                     99);
    const AcInReport report =
        ac_in_test(r, preset_double_mzi(false, PointerConfig{0.0, 1.0}));
    CHECK(report.ac_count + report.in_count == report.n_classified);
    CHECK(std::abs(report.match_fraction - 0.5) <
          4.0 * report.match_std_error);
    CHECK(report.verdict == "both_consistent");
}

TEST_CASE("the collapsed-photon alternative fails against the sliced data") {
    const EnsembleResult &r = weak_run();
    const AcInReport report =
        ac_in_test(r, preset_double_mzi(false, kWeak));
    CHECK(report.threshold == doctest::Approx(0.05));
    CHECK(report.z_lambda2 > 5.0);
    CHECK(std::abs(report.z_tsvf) < 4.0);
    CHECK(report.verdict == "lambda2_alternative_rejected");
    // The per-final conditional frequencies carry the same bias.
    CHECK(report.p_shifted_given_partner > report.p_shifted_given_other);
}

TEST_CASE("blocking the dark arm collapses the match asymmetry") {
    const CircuitSpec spec = preset_double_mzi(true, kWeak);
    const EnsembleResult r = run_ensemble(spec, 100000, 4242, 4);
    const AcInReport report = ac_in_test(r, spec);
    CHECK(std::abs(report.match_fraction - 0.5) <
          4.0 * report.match_std_error);
    // The exact prediction also collapses to chance under the block.
    CHECK(report.predicted_match_tsvf == doctest::Approx(0.5).epsilon(1e-9));
    // And the sliced means settle at g/2 on both sides.
    const SliceReport sliced = slice_means(r, slice(r, SliceCriterion::final_port()));
    for (const std::string label : {"Lf", "Rf"}) {
        const ProbeStats &st = sliced.stats[slice_index(sliced, label)][0];
        REQUIRE(std::abs(st.mean - kWeak.g / 2.0) < 4.0 * st.std_error);
    }
    CHECK(sliced.z[0] < 4.0);
}

TEST_CASE("pairing match probability grows from chance to certainty with "
          "the window") {
    const CircuitSpec spec = preset_double_mzi(false, kWeak);
    const auto cycles = run_single_photon_cycles(spec, 2000, 7);
    const double single = match_probability(spec, cycles, 1);
    CHECK(single > 0.40);
    CHECK(single < 0.62);
    CHECK(match_probability(spec, cycles, cycles.size()) == 1.0);
    CHECK_THROWS_AS(match_probability(spec, cycles, cycles.size() + 1),
                    ValidationError);
    CHECK_THROWS_AS(match_probability(spec, cycles, 0), ValidationError);
}

TEST_CASE("pairing match probability stays at chance for zero coupling") {
    const CircuitSpec spec = preset_double_mzi(false, PointerConfig{0.0, 1.0});
    const auto cycles = run_single_photon_cycles(spec, 2000, 13);
    const double p = match_probability(spec, cycles, 50);
    CHECK(p > 0.2);
    CHECK(p < 0.8);
}

TEST_CASE("reports flag slices too small for a standard error") {
    const EnsembleResult r =
        run_ensemble(preset_double_mzi(false, kWeak), 3, 5);
    const SliceReport report =
        slice_means(r, slice(r, SliceCriterion::final_port()));
    // With 3 trials one slice has <= 1 entry: either empty or se-less.
    CHECK(!report.flags.empty());
}
