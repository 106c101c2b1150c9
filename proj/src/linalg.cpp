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

#include "tsvflab/linalg.hpp"

#include <cmath>

namespace tsvflab {

namespace {

bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace

double Mat2::unitarity_defect() const {
    const Mat2 gram = adjoint() * (*this);
    const Mat2 id = Mat2::identity();
    double defect = 0.0;
    for (int k = 0; k < 4; ++k) {
        defect = std::max(defect, std::abs(gram.m[k] - id.m[k]));
    }
    return defect;
}

PathState::PathState(std::string port0, std::string port1, Complex a0,
                     Complex a1)
    : ports_{std::move(port0), std::move(port1)}, amps_{a0, a1} {
    if (ports_[0] == ports_[1]) {
        throw ValidationError("path state requires two distinct port labels, got '" +
                              ports_[0] + "' twice");
    }
    if (ports_[0].empty() || ports_[1].empty()) {
        throw ValidationError("path state port labels must be non-empty");
    }
    if (!is_finite(amps_[0]) || !is_finite(amps_[1])) {
        throw ValidationError("path state amplitudes must be finite");
    }
}

PathState PathState::basis(const std::string &port0, const std::string &port1,
                           int occupied_index) {
    if (occupied_index != 0 && occupied_index != 1) {
        throw ValidationError("basis index must be 0 or 1");
    }
    return PathState(port0, port1, occupied_index == 0 ? 1.0 : 0.0,
                     occupied_index == 1 ? 1.0 : 0.0);
}

int Projector::index_for(const PathState &reference) const {
    const int idx = reference.index_of(target_port);
    if (idx < 0) {
        throw ValidationError("projector target port '" + target_port +
                              "' is not a port of this stage");
    }
    return idx;
}

Mat2 Projector::matrix_for(const PathState &reference) const {
    const int idx = index_for(reference);
    return idx == 0 ? Mat2::diag(1.0, 0.0) : Mat2::diag(0.0, 1.0);
}

PathState apply_unitary(const Mat2 &u, const PathState &psi) {
    const double defect = u.unitarity_defect();
    if (!(defect <= kInputTol)) {
        throw ValidationError("matrix is not unitary (defect " +
                              std::to_string(defect) + ")");
    }
    return psi.with_amps(u.at(0, 0) * psi.amp(0) + u.at(0, 1) * psi.amp(1),
                         u.at(1, 0) * psi.amp(0) + u.at(1, 1) * psi.amp(1));
}

Complex inner_product(const PathState &phi, const PathState &psi) {
    if (phi.ports() != psi.ports()) {
        throw ValidationError("inner product requires matching port labels: (" +
                              phi.port(0) + "," + phi.port(1) + ") vs (" +
                              psi.port(0) + "," + psi.port(1) + ")");
    }
    return std::conj(phi.amp(0)) * psi.amp(0) +
           std::conj(phi.amp(1)) * psi.amp(1);
}

PathState normalize(const PathState &psi) {
    const double n2 = psi.norm2();
    // 1e-280 guards against denormal garbage from underflowed products.
    if (!(n2 > 1e-280)) {
        throw NullBranchError("cannot normalize a null branch (norm^2 = " +
                              std::to_string(n2) + ")");
    }
    const double inv = 1.0 / std::sqrt(n2);
    return psi.with_amps(psi.amp(0) * inv, psi.amp(1) * inv);
}

PathState project(const Projector &p, const PathState &psi) {
    const int idx = p.index_for(psi);
    return psi.with_amps(idx == 0 ? psi.amp(0) : 0.0,
                         idx == 1 ? psi.amp(1) : 0.0);
}

} // namespace tsvflab
