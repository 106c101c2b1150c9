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
 * Optical elements, port wiring, and the preset double Mach-Zehnder
 * circuits. A circuit is a linear chain of two-port stages: each element
 * consumes the current port pair and produces the next one, ending in a
 * projective detection over the final pair.
 *
 * Beam splitters use the symmetric convention
 *     bs(theta) = [[cos t, i sin t], [i sin t, cos t]],
 * with theta = pi/4 the 50:50 case. Mirrors and propagation phases are
 * absorbed into this convention; transfer amplitudes are therefore
 * convention-dependent, while probabilities and weak values are not.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tsvflab/linalg.hpp"
#include "tsvflab/pointer.hpp"
#include "tsvflab/rng.hpp"

namespace tsvflab {

using PortPair = std::array<std::string, 2>;

struct BeamSplitterElem {
    std::string name;
    PortPair in;
    PortPair out;
    double theta = 0.78539816339744830961; // pi/4
    bool dagger = false; // reversed-direction traversal

    Mat2 matrix() const;
};

struct PhaseShiftElem {
    PortPair ports;
    int target = 0; // index into ports
    double phi = 0.0;

    Mat2 matrix() const;
};

struct ProbeElem {
    std::string id;
    PortPair ports;
    int target = 0; // probed port index
    PointerConfig cfg;

    Projector projector() const { return Projector{ports[target]}; }
};

struct BlockElem {
    PortPair ports;
    int target = 0; // absorbing port index
};

using StageElement =
    std::variant<BeamSplitterElem, PhaseShiftElem, ProbeElem, BlockElem>;

/// Input pair of an element.
const PortPair &element_in(const StageElement &elem);
/// Output pair of an element (same as input except for beam splitters).
const PortPair &element_out(const StageElement &elem);

/// A validated linear optical circuit from one source port to a final
/// two-port detection.
struct CircuitSpec {
    std::string name;
    std::string source_port;
    std::vector<StageElement> stages;
    PortPair final_basis;

    /// Chain-connectivity and element validity checks. Throws
    /// ValidationError with a description of the first violation.
    void validate() const;

    /// Port pair live at position pos, where position 0 precedes the first
    /// element and position stages.size() is the final pair.
    const PortPair &pair_at(std::size_t pos) const;

    std::vector<const ProbeElem *> probes() const;
    std::vector<std::string> probe_ids() const;
    bool has_block() const;

    /// Stage index of a probe, or nullopt.
    std::optional<std::size_t> probe_position(const std::string &probe_id) const;

    /// First position whose pair contains the port, or nullopt.
    std::optional<std::size_t> first_position_of(const std::string &port) const;
    /// Last position whose pair contains the port, or nullopt.
    std::optional<std::size_t> last_position_of(const std::string &port) const;

    /// Content hash over the circuit structure and probe configurations.
    std::uint64_t fingerprint() const;

    /// Canonical one-line-per-stage text form used for hashing and digests.
    std::string canonical_description() const;
};

/// Symmetric beam-splitter matrix for mixing angle theta in [0, pi/2].
Mat2 bs_matrix(double theta);

/// The double Mach-Zehnder preset: BS1(L0,R0 -> L1,R1), probe W1 on L1,
/// BS2 -> (L2,R2), probe W2 on L2, optional block on L2, BS3 -> (Lf,Rf),
/// detection over (Lf,Rf); all splitters 50:50, source L0. With probes
/// disabled, the source exits BS2 entirely at R2 and the final ports fire
/// with probability 1/2 each.
CircuitSpec preset_double_mzi(bool blocked,
                              PointerConfig probe_cfg = PointerConfig{});

/// Same circuit with all probe stages removed.
CircuitSpec without_probes(const CircuitSpec &spec);

/// The same optics traversed in the opposite direction: stages reversed
/// with beam splitters replaced by their adjoints, source taken from the
/// original final pair, detection over the original source pair.
CircuitSpec reversed_circuit(const CircuitSpec &spec,
                             const std::string &new_source_port);

/// Same circuit with a different source port (must belong to the first pair).
CircuitSpec with_source(const CircuitSpec &spec, const std::string &source);

// ---------------------------------------------------------------------------
// Stochastic propagation

struct ProbeOutcome {
    double q = 0.0;
    PathState collapsed;
};

/// Supplies the probe physics during propagation; the default handler in
/// the trial engine samples a pointer reading and applies the conditional
/// collapse.
using ProbeHandler = std::function<ProbeOutcome(
    const ProbeElem &, const PathState &, TrialRng &)>;

struct PropagateResult {
    /// Final detected port; nullopt when the photon was absorbed at a block.
    std::optional<std::string> final_port;
    /// Pointer readings in circuit probe order; missing entries belong to
    /// probes after the absorption point.
    std::vector<std::optional<double>> readings;
    /// Born weight of the probed port immediately before each probe fired.
    std::vector<std::optional<double>> probe_port_occupancy;

    bool absorbed() const { return !final_port.has_value(); }
};

/// Runs one photon through the chain: unitaries applied in order, probes
/// delegated to the handler, blocks Born-sample absorption and project out
/// the blocked port, and the final detection samples the exit port.
PropagateResult propagate(const CircuitSpec &spec, const ProbeHandler &handler,
                          TrialRng &rng,
                          const std::optional<std::string> &inject_port = {});

/// Stochastic propagation through the elements before `pos` only; returns
/// the (normalized) state there, or nullopt when the photon was absorbed
/// earlier.
std::optional<PathState>
propagate_to(const CircuitSpec &spec, std::size_t pos,
             const ProbeHandler &handler, TrialRng &rng,
             const std::optional<std::string> &inject_port = {});

// ---------------------------------------------------------------------------
// Unitary-only propagation (probes ignored, blocks applied as projectors)

/// Transfer matrix of the chain between two positions.
Mat2 transfer_matrix(const CircuitSpec &spec, std::size_t from_pos,
                     std::size_t to_pos);

/// Amplitude at `out` given unit amplitude injected at `in`, probes
/// ignored and blocks applied as projectors.
Complex transfer_amplitude(const CircuitSpec &spec, const std::string &in,
                           const std::string &out);

/// Normalized forward-evolved state at a position (pre-selection side).
PathState forward_state(const CircuitSpec &spec, std::size_t pos,
                        const std::optional<std::string> &inject_port = {});

/// Normalized backward-evolved state at a position given the detected
/// final port (post-selection side).
PathState backward_state(const CircuitSpec &spec, std::size_t pos,
                         const std::string &final_port);

} // namespace tsvflab
