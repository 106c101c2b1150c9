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
 * Exact 2-dimensional complex linear algebra for labeled path states.
 * Every circuit stage superposes at most two simultaneously occupied
 * ports, so a stage-local 2-vector with explicit port labels replaces a
 * global Hilbert space.
 */

#pragma once

#include <array>
#include <complex>
#include <string>

#include "tsvflab/errors.hpp"

namespace tsvflab {

using Complex = std::complex<double>;

/// Tolerance for algebraic identities (norms, completeness sums).
inline constexpr double kAlgebraTol = 1e-12;
/// Tolerance for input validation (unitarity defects).
inline constexpr double kInputTol = 1e-9;

/// Dense complex 2x2 matrix, row-major.
struct Mat2 {
    std::array<Complex, 4> m{};

    static Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }
    static Mat2 diag(Complex a, Complex b) { return Mat2{{a, 0.0, 0.0, b}}; }

    Complex at(int row, int col) const { return m[2 * row + col]; }
    Complex &at(int row, int col) { return m[2 * row + col]; }

    Mat2 adjoint() const {
        return Mat2{{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]),
                     std::conj(m[3])}};
    }

    friend Mat2 operator*(const Mat2 &a, const Mat2 &b) {
        Mat2 out;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                out.at(i, j) =
                    a.at(i, 0) * b.at(0, j) + a.at(i, 1) * b.at(1, j);
            }
        }
        return out;
    }

    friend Mat2 operator+(const Mat2 &a, const Mat2 &b) {
        Mat2 out;
        for (int k = 0; k < 4; ++k) {
            out.m[k] = a.m[k] + b.m[k];
        }
        return out;
    }

    friend Mat2 operator*(Complex s, const Mat2 &a) {
        Mat2 out;
        for (int k = 0; k < 4; ++k) {
            out.m[k] = s * a.m[k];
        }
        return out;
    }

    /// Max entrywise |(U^dag U - I)_{ij}|.
    double unitarity_defect() const;
};

/// Normalized-by-convention amplitude pair over two labeled ports.
class PathState {
  public:
    PathState(std::string port0, std::string port1, Complex a0, Complex a1);

    const std::string &port(int i) const { return ports_[i]; }
    const std::array<std::string, 2> &ports() const { return ports_; }
    Complex amp(int i) const { return amps_[i]; }

    double norm2() const {
        return std::norm(amps_[0]) + std::norm(amps_[1]);
    }

    /// Index of a port label, or -1 when absent.
    int index_of(const std::string &port) const {
        if (port == ports_[0]) return 0;
        if (port == ports_[1]) return 1;
        return -1;
    }

    PathState with_amps(Complex a0, Complex a1) const {
        return PathState(ports_[0], ports_[1], a0, a1);
    }

    /// Basis state on one of this state's ports.
    static PathState basis(const std::string &port0, const std::string &port1,
                           int occupied_index);

  private:
    std::array<std::string, 2> ports_;
    std::array<Complex, 2> amps_;
};

/// Projector onto one port of a stage pair. Diagonal {1,0} or {0,1}, so
/// idempotence is exact.
struct Projector {
    std::string target_port;

    Mat2 matrix_for(const PathState &reference) const;
    int index_for(const PathState &reference) const;
};

/// U |psi>. Rejects U whose unitarity defect exceeds 1e-9.
PathState apply_unitary(const Mat2 &u, const PathState &psi);

/// <phi|psi>, conjugate-linear in the first argument. Port labels must match.
Complex inner_product(const PathState &phi, const PathState &psi);

/// psi / ||psi||. Throws NullBranchError on a (numerically) zero vector.
PathState normalize(const PathState &psi);

/// P |psi> without renormalization.
PathState project(const Projector &p, const PathState &psi);

} // namespace tsvflab
