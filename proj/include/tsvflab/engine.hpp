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
 * Seeded Monte Carlo executor. Every trial derives its own RNG stream
 * from counter_hash(master_seed, trial_id), so ensembles are bit-identical
 * for any worker count and execution order.
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsvflab/circuit.hpp"

namespace tsvflab {

/// One photon's ledger entry: per-probe pointer readings plus the strong
/// boundary outcomes and the seed that reproduces it.
struct TrialRecord {
    std::uint64_t trial_id = 0;
    std::string initial_port;
    /// Aligned with EnsembleResult::probes; missing entries belong to
    /// probes the surviving branch never reached.
    std::vector<std::optional<double>> readings;
    /// Detected port, or nullopt when the photon was absorbed at a block.
    std::optional<std::string> final_port;
    std::uint64_t seed = 0;
    /// Born weight of each probed port at probe time (in-memory diagnostic;
    /// not part of the serialized trial row).
    std::vector<std::optional<double>> occupancy;

    bool absorbed() const { return !final_port.has_value(); }
};

struct ProbeInfo {
    std::string id;
    std::string port;
    PointerConfig cfg;
};

struct SubsampleInfo {
    double fraction = 1.0;
    std::uint64_t seed = 0;
};

struct EnsembleResult {
    std::uint64_t fingerprint = 0; ///< circuit + probe-config content hash
    std::string circuit_name;
    std::string source_port;
    PortPair final_basis;
    std::vector<ProbeInfo> probes;
    std::uint64_t master_seed = 0;
    std::size_t requested_n = 0;
    std::vector<TrialRecord> trials;
    std::size_t absorbed_count = 0; ///< tracked explicitly, never silently
    /// Per-probe sums of the probed port's Born weight at probe time.
    std::vector<double> occupancy_sum;
    std::vector<std::uint64_t> occupancy_n;
    std::optional<SubsampleInfo> subsample;

    double mean_occupancy(std::size_t probe_index) const;
    int probe_index(const std::string &probe_id) const;
};

/// Runs one photon through the circuit. Deterministic given the seed.
TrialRecord run_trial(const CircuitSpec &spec, std::uint64_t seed,
                      std::uint64_t trial_id = 0,
                      const std::optional<std::string> &inject_port = {});

/// Runs n independent trials; trial k is seeded with
/// counter_hash(master_seed, k). Bit-identical for any `threads`.
EnsembleResult run_ensemble(const CircuitSpec &spec, std::size_t n,
                            std::uint64_t master_seed, unsigned threads = 1);

/// Order-stable content hash of an ensemble (trial payloads included);
/// equal hashes certify byte-identical reruns.
std::uint64_t result_hash(const EnsembleResult &result);

/// Final-port outcome counts over non-absorbed trials.
std::map<std::string, std::size_t> counts_by_final(const EnsembleResult &r);

// ---------------------------------------------------------------------------
// Single-photon cyclic variant

struct CycleRecord {
    std::uint64_t cycle_index = 0;
    enum class Direction { Forward, Backward } direction = Direction::Forward;
    std::string start_port;
    std::string end_port;
    /// Aligned with the forward circuit's probe order.
    std::vector<std::optional<double>> readings;
    std::uint64_t seed = 0;
};

struct CycleOptions {
    /// Whether probes also fire on backward passes.
    bool probes_on_backward = true;
    /// Per-pass survival probability; on loss the sequence ends early.
    double survival = 1.0;
};

/// One photon bouncing back and forth: pass k alternates between the
/// circuit and its reversed form, the end mirrors act as detectors, and
/// each pass is a fresh pre-selection from the previous pass's outcome.
std::vector<CycleRecord>
run_single_photon_cycles(const CircuitSpec &spec, std::size_t m,
                         std::uint64_t master_seed, CycleOptions opts = {});

// ---------------------------------------------------------------------------
// Density diagnostics

struct DensityEstimate {
    Mat2 mean;       ///< sample mean of the pure-state projector at the stage
    Mat2 std_error;  ///< per-entry standard errors (real, imag)
    std::size_t n = 0;
};

/// Monte Carlo estimate of the photon's state at a circuit position, with
/// probes firing as in a normal run. Trials absorbed before the position
/// are excluded.
DensityEstimate density_probe(const CircuitSpec &spec, std::size_t pos,
                              std::size_t n, std::uint64_t master_seed);

} // namespace tsvflab
