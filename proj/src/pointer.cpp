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

#include "tsvflab/pointer.hpp"

#include <cmath>
#include <vector>

namespace tsvflab {

void PointerConfig::validate() const {
    if (!(g >= 0.0) || !std::isfinite(g)) {
        throw ValidationError("pointer coupling g must be finite and >= 0");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ValidationError("pointer width sigma must be finite and > 0");
    }
}

double gaussian_amplitude(double x, double sigma) {
    const double two_pi = 6.28318530717958647692;
    return std::pow(two_pi * sigma * sigma, -0.25) *
           std::exp(-x * x / (4.0 * sigma * sigma));
}

double decoherence_factor(const PointerConfig &cfg) {
    cfg.validate();
    return std::exp(-cfg.g * cfg.g / (8.0 * cfg.sigma * cfg.sigma));
}

double sample_reading_q(const PointerConfig &cfg, double p, TrialRng &rng) {
    cfg.validate();
    if (!(p >= -kInputTol) || !(p <= 1.0 + kInputTol)) {
        throw ValidationError("branch probability out of [0,1]: " +
                              std::to_string(p));
    }
    const double clamped = std::min(1.0, std::max(0.0, p));
    const double mean = rng.bernoulli(clamped) ? cfg.g : 0.0;
    return rng.gaussian(mean, cfg.sigma);
}

WeakReading sample_reading(const std::string &probe_id,
                           const PointerConfig &cfg, double p, TrialRng &rng) {
    return WeakReading{probe_id, sample_reading_q(cfg, p, rng)};
}

PathState collapse_update(const PathState &psi, const Projector &pi,
                          const PointerConfig &cfg, double q) {
    cfg.validate();
    if (!std::isfinite(q)) {
        throw NullBranchError("pointer reading is not finite");
    }
    const int idx = pi.index_for(psi);
    const double s4 = 4.0 * cfg.sigma * cfg.sigma;
    const double log_w_hit = -(q - cfg.g) * (q - cfg.g) / s4;
    const double log_w_miss = -q * q / s4;
    // Shift by the larger exponent so at least one weight is exactly 1.
    const double shift = std::max(log_w_hit, log_w_miss);
    const double w_hit = std::exp(log_w_hit - shift);
    const double w_miss = std::exp(log_w_miss - shift);
    const Complex a0 = psi.amp(0) * (idx == 0 ? w_hit : w_miss);
    const Complex a1 = psi.amp(1) * (idx == 1 ? w_hit : w_miss);
    return normalize(psi.with_amps(a0, a1));
}

std::pair<int, PathState> strong_measure(const PathState &psi, TrialRng &rng) {
    const double p0 = std::norm(psi.amp(0)) / psi.norm2();
    const int outcome = rng.uniform01() < p0 ? 0 : 1;
    return {outcome, PathState::basis(psi.port(0), psi.port(1), outcome)};
}

double kraus_completeness_defect(const PointerConfig &cfg, int grid_points) {
    cfg.validate();
    if (grid_points < 3) {
        throw ValidationError("quadrature needs at least 3 grid points");
    }
    if (grid_points % 2 == 0) {
        ++grid_points; // Simpson needs an odd count
    }
    const double lo = -8.0 * cfg.sigma;
    const double hi = 8.0 * cfg.sigma;
    const double h = (hi - lo) / (grid_points - 1);
    double sum_hit = 0.0;
    double sum_miss = 0.0;
    for (int k = 0; k < grid_points; ++k) {
        const double q = lo + k * h;
        const double weight =
            (k == 0 || k == grid_points - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        const double ah = gaussian_amplitude(q - cfg.g, cfg.sigma);
        const double am = gaussian_amplitude(q, cfg.sigma);
        sum_hit += weight * ah * ah;
        sum_miss += weight * am * am;
    }
    sum_hit *= h / 3.0;
    sum_miss *= h / 3.0;
    // K^dag K = psi0(q-g)^2 Pi + psi0(q)^2 (I - Pi): the defect is diagonal.
    return std::max(std::abs(sum_hit - 1.0), std::abs(sum_miss - 1.0));
}

} // namespace tsvflab
