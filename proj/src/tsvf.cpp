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

#include "tsvflab/tsvf.hpp"

#include <cmath>

namespace tsvflab {

TwoStateVector::TwoStateVector(PathState pre_state, PathState post_state)
    : pre(std::move(pre_state)), post(std::move(post_state)) {
    if (pre.ports() != post.ports()) {
        throw ValidationError(
            "pre and post states must live at the same stage pair");
    }
}

Observable Observable::port_basis(const PortPair &ports) {
    return Observable{{PathState::basis(ports[0], ports[1], 0),
                       PathState::basis(ports[0], ports[1], 1)},
                      {0.0, 1.0}};
}

void Observable::validate() const {
    if (eigenbasis[0].ports() != eigenbasis[1].ports()) {
        throw ValidationError("observable eigenstates live at different stages");
    }
    const double n0 = std::abs(eigenbasis[0].norm2() - 1.0);
    const double n1 = std::abs(eigenbasis[1].norm2() - 1.0);
    const double ortho = std::abs(inner_product(eigenbasis[0], eigenbasis[1]));
    if (n0 > kAlgebraTol || n1 > kAlgebraTol || ortho > kAlgebraTol) {
        throw ValidationError("observable eigenbasis is not orthonormal");
    }
}

TwoStateVector tsv_at(const CircuitSpec &spec, std::size_t pos,
                      const std::string &post_port) {
    PathState pre = forward_state(spec, pos);
    try {
        PathState post = backward_state(spec, pos, post_port);
        return TwoStateVector(std::move(pre), std::move(post));
    } catch (const NullBranchError &) {
        throw UndefinedConditionalError(
            "post-selection on '" + post_port +
            "' cannot reach this stage (fully blocked path)");
    }
}

TwoStateVector tsv_at_probe(const CircuitSpec &spec,
                            const std::string &probe_id,
                            const std::string &post_port) {
    const auto pos = spec.probe_position(probe_id);
    if (!pos) {
        throw ValidationError("unknown probe id '" + probe_id + "'");
    }
    return tsv_at(spec, *pos, post_port);
}

double abl_probability(const TwoStateVector &tsv, const Observable &obs,
                       int j) {
    if (j != 0 && j != 1) {
        throw ValidationError("eigenvalue index must be 0 or 1");
    }
    obs.validate();
    if (obs.eigenbasis[0].ports() != tsv.pre.ports()) {
        throw ValidationError("observable and two-state vector live at "
                              "different stage pairs");
    }
    double weights[2];
    for (int i = 0; i < 2; ++i) {
        const Complex a = inner_product(tsv.post, obs.eigenbasis[i]) *
                          inner_product(obs.eigenbasis[i], tsv.pre);
        weights[i] = std::norm(a);
    }
    const double denom = weights[0] + weights[1];
    if (denom <= 1e-15) {
        throw UndefinedConditionalError(
            "conditional probability undefined: the post-selection is "
            "impossible for every intermediate outcome");
    }
    return weights[j] / denom;
}

WeakValueResult weak_value(const TwoStateVector &tsv, const Mat2 &op) {
    const Complex overlap = inner_product(tsv.post, tsv.pre);
    if (std::abs(overlap) <= kAlgebraTol) {
        throw UndefinedConditionalError(
            "weak value undefined: orthogonal pre- and post-selected states");
    }
    const PathState op_pre = tsv.pre.with_amps(
        op.at(0, 0) * tsv.pre.amp(0) + op.at(0, 1) * tsv.pre.amp(1),
        op.at(1, 0) * tsv.pre.amp(0) + op.at(1, 1) * tsv.pre.amp(1));
    return WeakValueResult{inner_product(tsv.post, op_pre) / overlap};
}

std::array<WeakValueResult, 2>
projector_weak_values(const TwoStateVector &tsv) {
    return {weak_value(tsv, Mat2::diag(1.0, 0.0)),
            weak_value(tsv, Mat2::diag(0.0, 1.0))};
}

double expected_pointer_shift(const TwoStateVector &tsv, const Projector &pi,
                              const PointerConfig &cfg) {
    cfg.validate();
    const int idx = pi.index_for(tsv.pre);
    // A = <Phi|Pi|psi>, B = <Phi|(I - Pi)|psi>.
    const Complex a =
        std::conj(tsv.post.amp(idx)) * tsv.pre.amp(idx);
    const Complex b = std::conj(tsv.post.amp(1 - idx)) * tsv.pre.amp(1 - idx);
    const double d = decoherence_factor(cfg);
    const double cross = (a * std::conj(b)).real();
    // The joint reading/post-selection density is
    //   p(q) = psi0(q-g)^2 |A|^2 + psi0(q)^2 |B|^2
    //        + 2 psi0(q-g) psi0(q) Re(A conj(B)),
    // and psi0(q-g) psi0(q) integrates to D with first moment D g / 2.
    const double denom = std::norm(a) + std::norm(b) + 2.0 * d * cross;
    if (denom <= 1e-15) {
        throw UndefinedConditionalError(
            "post-selection probability vanishes at this coupling");
    }
    const double numer = cfg.g * (std::norm(a) + d * cross);
    return numer / denom;
}

double expected_pointer_shift(const PathState &pre, const Projector &pi,
                              const PointerConfig &cfg) {
    cfg.validate();
    const int idx = pi.index_for(pre);
    const double p = std::norm(pre.amp(idx)) / pre.norm2();
    return cfg.g * p;
}

double leakage_probability(const PointerConfig &cfg) {
    return (1.0 - decoherence_factor(cfg)) / 2.0;
}

namespace {

Mat2 conjugate_by(const Mat2 &u, const Mat2 &rho) {
    return u * rho * u.adjoint();
}

} // namespace

Mat2 propagate_density_exact(const CircuitSpec &spec, std::size_t pos) {
    if (pos > spec.stages.size()) {
        throw ValidationError("position out of range");
    }
    const PortPair &pair0 = spec.pair_at(0);
    const int src = spec.source_port == pair0[0] ? 0 : 1;
    Mat2 rho = src == 0 ? Mat2::diag(1.0, 0.0) : Mat2::diag(0.0, 1.0);
    const Mat2 swap{{0.0, 1.0, 1.0, 0.0}};
    PortPair basis = pair0;
    for (std::size_t i = 0; i < pos; ++i) {
        const auto &stage = spec.stages[i];
        if (element_in(stage)[0] != basis[0]) {
            rho = conjugate_by(swap, rho);
        }
        if (const auto *bs = std::get_if<BeamSplitterElem>(&stage)) {
            rho = conjugate_by(bs->matrix(), rho);
        } else if (const auto *ps = std::get_if<PhaseShiftElem>(&stage)) {
            rho = conjugate_by(ps->matrix(), rho);
        } else if (const auto *probe = std::get_if<ProbeElem>(&stage)) {
            // Marginalizing the Kraus family over the reading dephases the
            // pair: off-diagonals shrink by the pointer overlap.
            const double d = decoherence_factor(probe->cfg);
            rho.at(0, 1) *= d;
            rho.at(1, 0) *= d;
        } else if (const auto *block = std::get_if<BlockElem>(&stage)) {
            const Mat2 proj = block->target == 0 ? Mat2::diag(0.0, 1.0)
                                                 : Mat2::diag(1.0, 0.0);
            rho = conjugate_by(proj, rho);
        }
        basis = element_out(stage);
    }
    return rho;
}

double exact_port_occupancy(const CircuitSpec &spec, const std::string &port) {
    const auto pos = spec.first_position_of(port);
    if (!pos) {
        throw ValidationError("unknown port '" + port + "'");
    }
    const Mat2 rho = propagate_density_exact(spec, *pos);
    const PortPair &pair = spec.pair_at(*pos);
    const int idx = port == pair[0] ? 0 : 1;
    return rho.at(idx, idx).real();
}

} // namespace tsvflab
