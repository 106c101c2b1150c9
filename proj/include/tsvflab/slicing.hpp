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
 * Slicing of recorded weak outcomes into pre/post-selected sub-ensembles,
 * significance statistics for the resurrection bias, seeded subsampling,
 * and the accurate/inaccurate match-class test against the collapsed-photon
 * alternative.
 */

#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tsvflab/engine.hpp"
#include "tsvflab/tsvf.hpp"

namespace tsvflab {

/// How to partition the non-absorbed trials of an ensemble.
struct SliceCriterion {
    enum class Key { FinalPort, InitialPort, Custom };
    Key key = Key::FinalPort;
    std::string name = "final_port";
    /// Label function for Custom criteria.
    std::function<std::string(const TrialRecord &)> labeler;

    static SliceCriterion final_port();
    static SliceCriterion initial_port();
    static SliceCriterion custom(std::string name,
                                 std::function<std::string(const TrialRecord &)> fn);
};

/// A partition of trial indices; absorbed trials are excluded and counted.
struct Slices {
    std::vector<std::string> labels; // sorted
    std::vector<std::vector<std::size_t>> trial_indices;
    std::size_t total = 0;    // non-absorbed trials
    std::size_t absorbed = 0; // excluded trials
};

Slices slice(const EnsembleResult &result, const SliceCriterion &criterion);

struct ProbeStats {
    std::size_t count = 0; // trials in the slice with a reading
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    bool se_defined = false;
};

struct SliceReport {
    std::vector<std::string> probe_ids;
    std::vector<std::string> slice_labels;
    std::vector<std::size_t> counts;
    std::vector<std::vector<ProbeStats>> stats; // [slice][probe]
    /// Per probe: |mean_a - mean_b| / sqrt(se_a^2 + se_b^2) between the two
    /// slices; NaN unless exactly two slices have defined errors.
    std::vector<double> z;
    std::vector<std::string> flags;
};

SliceReport slice_means(const EnsembleResult &result, const Slices &slices);

/// Seeded uniform subset without replacement of size round(fraction * N).
EnsembleResult subsample(const EnsembleResult &result, double fraction,
                         std::uint64_t seed);

/// Match-class report: trials are labeled by thresholding the first
/// probe's reading at g/2 and classified as accurate (label pairs with the
/// final port as in the unblocked preset: shifted label with the second
/// detection port) or inaccurate. The observed match fraction is compared
/// against the exact pre/post-selection prediction and against the
/// collapsed-photon alternative, whose correlation budget is bounded by
/// the dark-port leakage.
struct AcInReport {
    std::size_t n_classified = 0;
    std::size_t ac_count = 0;
    std::size_t in_count = 0;
    double threshold = 0.0;
    double match_fraction = 0.0;
    double match_std_error = 0.0;
    /// Observed conditional frequencies of the shifted label per final port.
    double p_shifted_given_partner = 0.0; // e.g. P(L1-label | Rf)
    double p_shifted_given_other = 0.0;   // e.g. P(L1-label | Lf)
    double predicted_match_tsvf = 0.0;
    double predicted_match_lambda2 = 0.0;
    double z_tsvf = 0.0;
    double z_lambda2 = 0.0;
    std::string verdict; // "lambda2_alternative_rejected", "tsvf_rejected",
                         // "both_consistent", "both_rejected"
};

AcInReport ac_in_test(const EnsembleResult &result, const CircuitSpec &spec);

/// Fraction of sliding cycle windows whose aggregated sliced readings
/// reproduce the mirror pairings: the first probe's readings side with the
/// far-side strong outcome of each pass and the second probe's with the
/// near-side one. A window matches when the mean of sign * (q - g/2) over
/// its readings is positive, with sign +1 for passes whose paired strong
/// outcome is the shifted partner.
double match_probability(const CircuitSpec &spec,
                         const std::vector<CycleRecord> &cycles,
                         std::size_t window);

} // namespace tsvflab
