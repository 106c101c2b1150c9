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

#include "tsvflab/slicing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace tsvflab {

namespace {

/// P(N(0,1) >= x).
double upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

} // namespace

SliceCriterion SliceCriterion::final_port() {
    return SliceCriterion{Key::FinalPort, "final_port", nullptr};
}

SliceCriterion SliceCriterion::initial_port() {
    return SliceCriterion{Key::InitialPort, "initial_port", nullptr};
}

SliceCriterion
SliceCriterion::custom(std::string name,
                       std::function<std::string(const TrialRecord &)> fn) {
    if (!fn) {
        throw ValidationError("custom slice criterion requires a labeler");
    }
    return SliceCriterion{Key::Custom, std::move(name), std::move(fn)};
}

Slices slice(const EnsembleResult &result, const SliceCriterion &criterion) {
    std::map<std::string, std::vector<std::size_t>> buckets;
    // Seed the expected labels so empty slices stay visible.
    if (criterion.key == SliceCriterion::Key::FinalPort) {
        buckets[result.final_basis[0]];
        buckets[result.final_basis[1]];
    } else if (criterion.key == SliceCriterion::Key::InitialPort) {
        buckets[result.source_port];
    }
    Slices out;
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const TrialRecord &t = result.trials[i];
        if (t.absorbed()) {
            ++out.absorbed;
            continue;
        }
        std::string label;
        switch (criterion.key) {
        case SliceCriterion::Key::FinalPort:
            label = *t.final_port;
            break;
        case SliceCriterion::Key::InitialPort:
            label = t.initial_port;
            break;
        case SliceCriterion::Key::Custom:
            label = criterion.labeler(t);
            break;
        }
        buckets[label].push_back(i);
        ++out.total;
    }
    for (auto &[label, indices] : buckets) {
        out.labels.push_back(label);
        out.trial_indices.push_back(std::move(indices));
    }
    return out;
}

SliceReport slice_means(const EnsembleResult &result, const Slices &slices) {
    SliceReport report;
    for (const auto &probe : result.probes) {
        report.probe_ids.push_back(probe.id);
    }
    report.slice_labels = slices.labels;
    if (slices.total == 0) {
        report.flags.push_back("empty ensemble: no non-absorbed trials");
    }
    for (std::size_t s = 0; s < slices.labels.size(); ++s) {
        const auto &indices = slices.trial_indices[s];
        report.counts.push_back(indices.size());
        if (indices.empty()) {
            report.flags.push_back("empty slice: " + slices.labels[s]);
        }
        std::vector<ProbeStats> row;
        for (std::size_t p = 0; p < report.probe_ids.size(); ++p) {
            ProbeStats stats;
            double sum = 0.0;
            double sum_sq = 0.0;
            for (std::size_t idx : indices) {
                const auto &r = result.trials[idx].readings;
                if (p < r.size() && r[p]) {
                    sum += *r[p];
                    sum_sq += *r[p] * *r[p];
                    ++stats.count;
                }
            }
            if (stats.count > 0) {
                stats.mean = sum / static_cast<double>(stats.count);
            }
            if (stats.count > 1) {
                const double var =
                    (sum_sq - sum * sum / static_cast<double>(stats.count)) /
                    static_cast<double>(stats.count - 1);
                stats.std_error =
                    std::sqrt(std::max(0.0, var) /
                              static_cast<double>(stats.count));
                stats.se_defined = true;
            } else if (stats.count == 1) {
                report.flags.push_back("slice '" + slices.labels[s] +
                                       "' too small for a standard error (" +
                                       report.probe_ids[p] + ")");
            }
            row.push_back(stats);
        }
        report.stats.push_back(std::move(row));
    }
    // Inter-slice z per probe, defined only for a clean two-slice split.
    for (std::size_t p = 0; p < report.probe_ids.size(); ++p) {
        double z = std::numeric_limits<double>::quiet_NaN();
        if (report.stats.size() == 2 && report.stats[0][p].se_defined &&
            report.stats[1][p].se_defined) {
            const double d = report.stats[0][p].mean - report.stats[1][p].mean;
            const double se =
                std::sqrt(report.stats[0][p].std_error * report.stats[0][p].std_error +
                          report.stats[1][p].std_error * report.stats[1][p].std_error);
            if (se > 0.0) {
                z = std::abs(d) / se;
            }
        }
        report.z.push_back(z);
    }
    return report;
}

EnsembleResult subsample(const EnsembleResult &result, double fraction,
                         std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ValidationError("subsample fraction must be in (0, 1]");
    }
    const std::size_t n = result.trials.size();
    const auto k = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(n)));
    if (k == 0) {
        throw ValidationError("subsample would be empty");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    TrialRng rng(seed);
    // Partial Fisher-Yates: the first k entries are a uniform subset.
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.uniform01() *
                                         static_cast<double>(n - i));
        std::swap(order[i], order[std::min(j, n - 1)]);
    }
    std::vector<std::size_t> chosen(order.begin(), order.begin() + k);
    std::sort(chosen.begin(), chosen.end());

    EnsembleResult out;
    out.fingerprint = result.fingerprint;
    out.circuit_name = result.circuit_name;
    out.source_port = result.source_port;
    out.final_basis = result.final_basis;
    out.probes = result.probes;
    out.master_seed = result.master_seed;
    out.requested_n = k;
    out.subsample = SubsampleInfo{fraction, seed};
    out.occupancy_sum.assign(result.probes.size(), 0.0);
    out.occupancy_n.assign(result.probes.size(), 0);
    for (std::size_t idx : chosen) {
        out.trials.push_back(result.trials[idx]);
    }
    for (const TrialRecord &t : out.trials) {
        if (t.absorbed()) {
            ++out.absorbed_count;
        }
        for (std::size_t j = 0; j < out.probes.size(); ++j) {
            if (j < t.occupancy.size() && t.occupancy[j]) {
                out.occupancy_sum[j] += *t.occupancy[j];
                ++out.occupancy_n[j];
            }
        }
    }
    return out;
}

AcInReport ac_in_test(const EnsembleResult &result, const CircuitSpec &spec) {
    if (result.probes.empty()) {
        throw ValidationError("match-class test requires at least one probe");
    }
    const ProbeInfo &w1 = result.probes.front();
    const std::string partner = result.final_basis[1]; // shifted label's mate
    const std::string other = result.final_basis[0];

    AcInReport report;
    report.threshold = w1.cfg.g / 2.0;

    std::size_t shifted_partner = 0;
    std::size_t shifted_other = 0;
    std::size_t n_partner = 0;
    std::size_t n_other = 0;
    for (const TrialRecord &t : result.trials) {
        if (t.absorbed() || t.readings.empty() || !t.readings.front()) {
            continue;
        }
        const bool shifted = *t.readings.front() >= report.threshold;
        const bool to_partner = *t.final_port == partner;
        if (to_partner) {
            ++n_partner;
            shifted_partner += shifted ? 1 : 0;
        } else {
            ++n_other;
            shifted_other += shifted ? 1 : 0;
        }
        const bool match = shifted == to_partner;
        report.ac_count += match ? 1 : 0;
        report.in_count += match ? 0 : 1;
    }
    report.n_classified = report.ac_count + report.in_count;
    if (report.n_classified == 0) {
        throw ValidationError("match-class test has no classified trials");
    }
    const auto nd = static_cast<double>(report.n_classified);
    report.match_fraction = static_cast<double>(report.ac_count) / nd;
    report.match_std_error = std::sqrt(
        std::max(1e-300, report.match_fraction * (1.0 - report.match_fraction)) / nd);
    report.p_shifted_given_partner =
        n_partner > 0 ? static_cast<double>(shifted_partner) / n_partner : 0.0;
    report.p_shifted_given_other =
        n_other > 0 ? static_cast<double>(shifted_other) / n_other : 0.0;

    // Exact match prediction from the pre/post-selection Gaussian algebra:
    // given final port f the reading density is
    //   |A|^2 N(g, s^2) + |B|^2 N(0, s^2) + 2 Re(A conj B) D N(g/2, s^2)
    // with A = <Phi_f|Pi|psi>, B = <Phi_f|(I - Pi)|psi>.
    const double d = decoherence_factor(w1.cfg);
    const double g = w1.cfg.g;
    const double s = w1.cfg.sigma;
    const double t0 = report.threshold;
    double weight_sum = 0.0;
    double match_sum = 0.0;
    for (const std::string &f : {partner, other}) {
        TwoStateVector tsv = tsv_at_probe(spec, w1.id, f);
        const int idx = Projector{w1.port}.index_for(tsv.pre);
        const Complex a = std::conj(tsv.post.amp(idx)) * tsv.pre.amp(idx);
        const Complex b =
            std::conj(tsv.post.amp(1 - idx)) * tsv.pre.amp(1 - idx);
        const double cross = (a * std::conj(b)).real();
        const double weight = std::norm(a) + std::norm(b) + 2.0 * d * cross;
        const double p_shifted =
            weight <= 1e-15
                ? 0.0
                : (std::norm(a) * upper_tail((t0 - g) / s) +
                   std::norm(b) * upper_tail(t0 / s) +
                   2.0 * cross * d * upper_tail((t0 - g / 2.0) / s)) /
                      weight;
        const double p_match = (f == partner) ? p_shifted : 1.0 - p_shifted;
        weight_sum += weight;
        match_sum += weight * p_match;
    }
    report.predicted_match_tsvf = match_sum / weight_sum;
    // The collapsed-photon alternative only lets the dark-port fraction of
    // trials carry any which-path/final correlation.
    report.predicted_match_lambda2 = 0.5 + leakage_probability(w1.cfg);

    report.z_tsvf = (report.match_fraction - report.predicted_match_tsvf) /
                    report.match_std_error;
    report.z_lambda2 =
        (report.match_fraction - report.predicted_match_lambda2) /
        report.match_std_error;

    const bool tsvf_ok = std::abs(report.z_tsvf) < 4.0;
    const bool lambda2_rejected = report.z_lambda2 > 5.0;
    if (lambda2_rejected && tsvf_ok) {
        report.verdict = "lambda2_alternative_rejected";
    } else if (!tsvf_ok && std::abs(report.z_lambda2) < 4.0) {
        report.verdict = "tsvf_rejected";
    } else if (tsvf_ok) {
        report.verdict = "both_consistent";
    } else {
        report.verdict = "both_rejected";
    }
    return report;
}

double match_probability(const CircuitSpec &spec,
                         const std::vector<CycleRecord> &cycles,
                         std::size_t window) {
    if (window < 1) {
        throw ValidationError("window must be at least 1");
    }
    if (cycles.size() < window) {
        throw ValidationError("fewer cycles than the window size");
    }
    const auto probes = spec.probes();
    if (probes.empty()) {
        throw ValidationError("pairing test requires at least one probe");
    }
    const std::string far_partner = spec.final_basis[1];
    const std::string near_partner = spec.pair_at(0)[1];

    // Prefix sums of the per-pass score terms enable O(1) window sums.
    std::vector<double> prefix_sum(cycles.size() + 1, 0.0);
    std::vector<std::size_t> prefix_count(cycles.size() + 1, 0);
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const CycleRecord &pass = cycles[i];
        const bool forward =
            pass.direction == CycleRecord::Direction::Forward;
        double term = 0.0;
        std::size_t count = 0;
        for (std::size_t p = 0; p < probes.size() && p < 2; ++p) {
            if (p >= pass.readings.size() || !pass.readings[p]) {
                continue;
            }
            // First probe pairs with the far-side strong outcome of the
            // pass, second probe with the near-side one.
            const std::string &paired_port =
                (p == 0) == forward ? pass.end_port : pass.start_port;
            const bool expect_shift =
                paired_port == ((p == 0) ? far_partner : near_partner);
            const double g = probes[p]->cfg.g;
            const double centered = *pass.readings[p] - g / 2.0;
            term += expect_shift ? centered : -centered;
            ++count;
        }
        prefix_sum[i + 1] = prefix_sum[i] + term;
        prefix_count[i + 1] = prefix_count[i] + count;
    }

    std::size_t matches = 0;
    std::size_t total = 0;
    for (std::size_t start = 0; start + window <= cycles.size(); ++start) {
        const double sum = prefix_sum[start + window] - prefix_sum[start];
        const std::size_t count =
            prefix_count[start + window] - prefix_count[start];
        if (count == 0) {
            continue;
        }
        ++total;
        if (sum > 0.0) {
            ++matches;
        }
    }
    if (total == 0) {
        throw ValidationError("no windows contained any readings");
    }
    return static_cast<double>(matches) / static_cast<double>(total);
}

} // namespace tsvflab
