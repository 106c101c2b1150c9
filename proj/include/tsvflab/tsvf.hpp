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
 * Exact two-state-vector analytics used to validate the Monte Carlo
 * engine: time-symmetric conditional probabilities for a complete
 * intermediate measurement, weak values, finite-strength post-selected
 * pointer shifts, and dark-port leakage.
 *
 * A pre/post pair (|psi>, <Phi|) at a stage fixes the conditional
 * probability of an intermediate outcome c_j as
 *
 *     P(c_j) = |<Phi|c_j><c_j|psi>|^2 / sum_i |<Phi|c_i><c_i|psi>|^2
 *
 * and the weak value of an operator O as <Phi|O|psi> / <Phi|psi>, which
 * may lie outside O's eigenvalue range.
 */

#pragma once

#include <array>

#include "tsvflab/circuit.hpp"
#include "tsvflab/linalg.hpp"
#include "tsvflab/pointer.hpp"

namespace tsvflab {

/// Pre-selected state (forward-evolved from the source) and post-selected
/// state (backward-evolved from the detected port), both at one stage.
struct TwoStateVector {
    PathState pre;
    PathState post;

    TwoStateVector(PathState pre_state, PathState post_state);
};

/// A dichotomic observable over a stage pair: orthonormal eigenbasis and
/// real eigenvalues.
struct Observable {
    std::array<PathState, 2> eigenbasis;
    std::array<double, 2> eigenvalues;

    /// Port basis {|p0>, |p1>} with eigenvalues {0, 1} on the target port.
    static Observable port_basis(const PortPair &ports);

    /// Orthonormality and completeness check; throws ValidationError.
    void validate() const;
};

struct WeakValueResult {
    Complex value;
};

/// Two-state vector at a circuit position: pre forward-evolved from the
/// source, post backward-evolved from `post_port`. Throws
/// UndefinedConditionalError when the post-selection cannot reach the
/// position (fully blocked path).
TwoStateVector tsv_at(const CircuitSpec &spec, std::size_t pos,
                      const std::string &post_port);

/// Two-state vector at the stage where a probe acts.
TwoStateVector tsv_at_probe(const CircuitSpec &spec,
                            const std::string &probe_id,
                            const std::string &post_port);

/// Time-symmetric conditional probability of eigenvalue j of obs, given
/// the boundary states. Throws UndefinedConditionalError when the
/// post-selection is impossible for every intermediate outcome.
double abl_probability(const TwoStateVector &tsv, const Observable &obs,
                       int j);

/// <Phi|O|psi> / <Phi|psi>. Throws UndefinedConditionalError for
/// orthogonal boundary states.
WeakValueResult weak_value(const TwoStateVector &tsv, const Mat2 &op);

/// Weak values of the two port projectors at the stage; they sum to 1.
std::array<WeakValueResult, 2>
projector_weak_values(const TwoStateVector &tsv);

/// Exact finite-strength mean pointer reading conditioned on the
/// post-selection, from closed-form Gaussian algebra over the Kraus
/// family. Converges to g * Re(Pi_w) as epsilon -> 0.
double expected_pointer_shift(const TwoStateVector &tsv, const Projector &pi,
                              const PointerConfig &cfg);

/// Unconditioned mean reading over the pre-selected ensemble:
/// g * <psi|Pi|psi>.
double expected_pointer_shift(const PathState &pre, const Projector &pi,
                              const PointerConfig &cfg);

/// Probability that a photon occupies the dark port after the second
/// splitter of the preset, given a stage-1 probe with this configuration:
/// (1 - decoherence_factor) / 2. Quadratic in epsilon as epsilon -> 0.
double leakage_probability(const PointerConfig &cfg);

/// Exact ensemble-averaged (unnormalized) density matrix at a position:
/// probes act as dephasing channels with their decoherence factor, blocks
/// as projections. The trace is the survival probability up to `pos`.
Mat2 propagate_density_exact(const CircuitSpec &spec, std::size_t pos);

/// Exact ensemble-averaged Born weight of a port, with probe dephasing
/// accounted for. Independent route to leakage_probability on the preset.
double exact_port_occupancy(const CircuitSpec &spec, const std::string &port);

} // namespace tsvflab
