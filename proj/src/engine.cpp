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

#include "tsvflab/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

namespace tsvflab {

namespace {

ProbeOutcome default_probe_handler(const ProbeElem &probe,
                                   const PathState &state, TrialRng &rng) {
    const double p = std::norm(state.amp(probe.target)) / state.norm2();
    const double q = sample_reading_q(probe.cfg, p, rng);
    return ProbeOutcome{q, collapse_update(state, probe.projector(),
                                           probe.cfg, q)};
}

std::vector<ProbeInfo> probe_infos(const CircuitSpec &spec) {
    std::vector<ProbeInfo> infos;
    for (const auto *probe : spec.probes()) {
        infos.push_back(
            ProbeInfo{probe->id, probe->ports[probe->target], probe->cfg});
    }
    return infos;
}

void hash_bytes(std::uint64_t &h, const void *data, std::size_t len) {
    const auto *bytes = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ULL;
    }
}

void hash_u64(std::uint64_t &h, std::uint64_t v) {
    hash_bytes(h, &v, sizeof(v));
}

void hash_double(std::uint64_t &h, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    hash_bytes(h, &bits, sizeof(bits));
}

void hash_string(std::uint64_t &h, const std::string &s) {
    hash_bytes(h, s.data(), s.size());
    hash_bytes(h, "\0", 1);
}

} // namespace

double EnsembleResult::mean_occupancy(std::size_t probe_index) const {
    if (probe_index >= occupancy_sum.size() ||
        occupancy_n[probe_index] == 0) {
        throw ValidationError("no occupancy samples for this probe");
    }
    return occupancy_sum[probe_index] /
           static_cast<double>(occupancy_n[probe_index]);
}

int EnsembleResult::probe_index(const std::string &probe_id) const {
    for (std::size_t i = 0; i < probes.size(); ++i) {
        if (probes[i].id == probe_id) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

TrialRecord run_trial(const CircuitSpec &spec, std::uint64_t seed,
                      std::uint64_t trial_id,
                      const std::optional<std::string> &inject_port) {
    TrialRng rng(seed);
    PropagateResult prop =
        propagate(spec, default_probe_handler, rng, inject_port);
    TrialRecord record;
    record.trial_id = trial_id;
    record.initial_port = inject_port.value_or(spec.source_port);
    record.readings = std::move(prop.readings);
    record.final_port = std::move(prop.final_port);
    record.seed = seed;
    record.occupancy = std::move(prop.probe_port_occupancy);
    return record;
}

EnsembleResult run_ensemble(const CircuitSpec &spec, std::size_t n,
                            std::uint64_t master_seed, unsigned threads) {
    if (n < 1) {
        throw ValidationError("ensemble size must be at least 1");
    }
    spec.validate();
    EnsembleResult result;
    result.fingerprint = spec.fingerprint();
    result.circuit_name = spec.name;
    result.source_port = spec.source_port;
    result.final_basis = spec.final_basis;
    result.probes = probe_infos(spec);
    result.master_seed = master_seed;
    result.requested_n = n;
    result.trials.resize(n);
    result.occupancy_sum.assign(result.probes.size(), 0.0);
    result.occupancy_n.assign(result.probes.size(), 0);

    const std::size_t n_probes = result.probes.size();
    const unsigned workers = std::max(1u, threads);

    auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            const std::uint64_t seed = counter_hash(master_seed, k);
            TrialRng rng(seed);
            PropagateResult prop = propagate(spec, default_probe_handler, rng);
            TrialRecord &record = result.trials[k];
            record.trial_id = k;
            record.initial_port = spec.source_port;
            record.readings = std::move(prop.readings);
            record.final_port = std::move(prop.final_port);
            record.seed = seed;
            record.occupancy = std::move(prop.probe_port_occupancy);
        }
    };

    if (workers <= 1 || n < 2 * workers) {
        run_range(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = std::min<std::size_t>(w * chunk, n);
            const std::size_t hi = std::min<std::size_t>(lo + chunk, n);
            if (lo < hi) {
                pool.emplace_back(run_range, lo, hi);
            }
        }
        for (auto &t : pool) {
            t.join();
        }
    }

    // Aggregate in trial order so the sums do not depend on worker count.
    for (const TrialRecord &t : result.trials) {
        if (t.absorbed()) {
            ++result.absorbed_count;
        }
        for (std::size_t j = 0; j < n_probes; ++j) {
            if (j < t.occupancy.size() && t.occupancy[j]) {
                result.occupancy_sum[j] += *t.occupancy[j];
                ++result.occupancy_n[j];
            }
        }
    }
    return result;
}

std::uint64_t result_hash(const EnsembleResult &result) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    hash_u64(h, result.fingerprint);
    hash_u64(h, result.master_seed);
    hash_u64(h, result.requested_n);
    for (const TrialRecord &t : result.trials) {
        hash_u64(h, t.trial_id);
        hash_string(h, t.initial_port);
        hash_string(h, t.final_port.value_or(""));
        hash_u64(h, t.seed);
        for (const auto &r : t.readings) {
            hash_u64(h, r.has_value() ? 1 : 0);
            hash_double(h, r.value_or(0.0));
        }
    }
    return h;
}

std::map<std::string, std::size_t> counts_by_final(const EnsembleResult &r) {
    std::map<std::string, std::size_t> counts;
    counts[r.final_basis[0]] = 0;
    counts[r.final_basis[1]] = 0;
    for (const TrialRecord &t : r.trials) {
        if (t.final_port) {
            ++counts[*t.final_port];
        }
    }
    return counts;
}

std::vector<CycleRecord>
run_single_photon_cycles(const CircuitSpec &spec, std::size_t m,
                         std::uint64_t master_seed, CycleOptions opts) {
    if (m < 1) {
        throw ValidationError("cycle count must be at least 1");
    }
    if (!(opts.survival > 0.0 && opts.survival <= 1.0)) {
        throw ValidationError("per-pass survival must be in (0, 1]");
    }
    spec.validate();
    const std::vector<std::string> forward_ids = spec.probe_ids();

    // The backward direction traverses the adjoint optics; readings are
    // mapped back to the forward probe order.
    const CircuitSpec backward_template =
        reversed_circuit(spec, spec.final_basis[0]);
    const CircuitSpec backward_spec =
        opts.probes_on_backward ? backward_template
                                : without_probes(backward_template);
    std::vector<int> backward_to_forward;
    for (const auto &id : backward_spec.probe_ids()) {
        int idx = -1;
        for (std::size_t j = 0; j < forward_ids.size(); ++j) {
            if (forward_ids[j] == id) {
                idx = static_cast<int>(j);
            }
        }
        backward_to_forward.push_back(idx);
    }

    std::vector<CycleRecord> records;
    records.reserve(m);
    std::string current_port = spec.source_port;
    for (std::size_t k = 0; k < m; ++k) {
        const bool forward = (k % 2 == 0);
        const std::uint64_t seed = counter_hash(master_seed, k);
        TrialRng rng(seed);

        CycleRecord record;
        record.cycle_index = k;
        record.direction = forward ? CycleRecord::Direction::Forward
                                   : CycleRecord::Direction::Backward;
        record.start_port = current_port;
        record.seed = seed;
        record.readings.assign(forward_ids.size(), std::nullopt);

        const CircuitSpec &pass_spec = forward ? spec : backward_spec;
        PropagateResult prop =
            propagate(pass_spec, default_probe_handler, rng, current_port);
        // Lossless passes always end on a mirror-detector.
        record.end_port = prop.final_port.value();
        if (forward) {
            record.readings = std::move(prop.readings);
        } else {
            for (std::size_t j = 0; j < prop.readings.size(); ++j) {
                if (backward_to_forward[j] >= 0) {
                    record.readings[backward_to_forward[j]] = prop.readings[j];
                }
            }
        }
        current_port = record.end_port;
        records.push_back(std::move(record));

        if (opts.survival < 1.0 && !rng.bernoulli(opts.survival)) {
            break; // photon lost; the experiment ends here
        }
    }
    return records;
}

DensityEstimate density_probe(const CircuitSpec &spec, std::size_t pos,
                              std::size_t n, std::uint64_t master_seed) {
    if (n < 2) {
        throw ValidationError("density estimate needs at least 2 trials");
    }
    spec.validate();
    Mat2 sum{};
    Mat2 sum_sq_re{};
    Mat2 sum_sq_im{};
    std::size_t kept = 0;
    for (std::size_t k = 0; k < n; ++k) {
        TrialRng rng(counter_hash(master_seed, k));
        auto state = propagate_to(spec, pos, default_probe_handler, rng);
        if (!state) {
            continue;
        }
        const PathState psi = normalize(*state);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const Complex outer = psi.amp(i) * std::conj(psi.amp(j));
                sum.at(i, j) += outer;
                sum_sq_re.at(i, j) += outer.real() * outer.real();
                sum_sq_im.at(i, j) += outer.imag() * outer.imag();
            }
        }
        ++kept;
    }
    if (kept < 2) {
        throw ValidationError("too few surviving trials for a density estimate");
    }
    DensityEstimate est;
    est.n = kept;
    const double inv = 1.0 / static_cast<double>(kept);
    for (int k = 0; k < 4; ++k) {
        est.mean.m[k] = sum.m[k] * inv;
        const double var_re = std::max(
            0.0, sum_sq_re.m[k].real() * inv -
                     est.mean.m[k].real() * est.mean.m[k].real());
        const double var_im = std::max(
            0.0, sum_sq_im.m[k].real() * inv -
                     est.mean.m[k].imag() * est.mean.m[k].imag());
        est.std_error.m[k] = Complex(std::sqrt(var_re / kept),
                                     std::sqrt(var_im / kept));
    }
    return est;
}

} // namespace tsvflab
