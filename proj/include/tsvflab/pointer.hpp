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
 * Gaussian-pointer measurement back-end.
 *
 * A probe couples a fresh Gaussian pointer of width sigma to a path
 * projector Pi; the pointer is read out sharply once per trial and reset,
 * so each recorded outcome is self-contained. The conditional state update
 * is the Kraus family
 *
 *     K(q) = psi0(q - g) Pi + psi0(q) (I - Pi),
 *
 * with psi0 the real Gaussian amplitude whose modulus squared has standard
 * deviation sigma. The reading density for branch probability p is the
 * mixture p N(g, sigma^2) + (1-p) N(0, sigma^2), and marginalizing the
 * update over q dephases the probed pair by D = exp(-g^2 / (8 sigma^2)).
 */

#pragma once

#include <string>
#include <utility>

#include "tsvflab/linalg.hpp"
#include "tsvflab/rng.hpp"

namespace tsvflab {

/// Coupling g and initial pointer width sigma of one weak probe.
/// The weakness ratio is epsilon = g / sigma; epsilon << 1 is the weak
/// regime, large epsilon approaches a projective measurement.
struct PointerConfig {
    double g = 0.1;
    double sigma = 1.0;

    double epsilon() const { return g / sigma; }
    void validate() const;
};

/// One sharp readout of a probe's pointer position.
struct WeakReading {
    std::string probe_id;
    double q = 0.0;
};

/// psi0(x): real Gaussian amplitude of width sigma, |psi0|^2 = N(0, sigma^2).
double gaussian_amplitude(double x, double sigma);

/// Pointer-state overlap <psi0(. - g), psi0(.)> = exp(-g^2 / (8 sigma^2)).
/// The off-diagonal coherence of the probed pair shrinks by this factor.
double decoherence_factor(const PointerConfig &cfg);

/// Draw a pointer reading given the branch probability p = <psi|Pi|psi>.
double sample_reading_q(const PointerConfig &cfg, double p, TrialRng &rng);

WeakReading sample_reading(const std::string &probe_id,
                           const PointerConfig &cfg, double p, TrialRng &rng);

/// Conditional state update for reading q: amplitudes are reweighted by
/// psi0(q - g) on the projected port and psi0(q) on the other, then
/// renormalized. Computed with a common-factor shift so the weights never
/// underflow for finite q.
PathState collapse_update(const PathState &psi, const Projector &pi,
                          const PointerConfig &cfg, double q);

/// Projective measurement in the port basis: Born-samples an outcome and
/// returns (port index, collapsed basis state).
std::pair<int, PathState> strong_measure(const PathState &psi, TrialRng &rng);

/// Max entrywise defect of the numerical completeness sum
/// integral K^dag(q) K(q) dq vs the identity, on a Simpson grid spanning
/// +-8 sigma.
double kraus_completeness_defect(const PointerConfig &cfg,
                                 int grid_points = 4001);

} // namespace tsvflab
