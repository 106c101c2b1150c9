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

#include "tsvflab/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsvflab {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

void format_double(std::ostream &os, double v) { os << std::hexfloat << v; }

} // namespace

Mat2 BeamSplitterElem::matrix() const {
    const Mat2 b = bs_matrix(theta);
    return dagger ? b.adjoint() : b;
}

Mat2 PhaseShiftElem::matrix() const {
    const Complex phase = std::polar(1.0, phi);
    return target == 0 ? Mat2::diag(phase, 1.0) : Mat2::diag(1.0, phase);
}

const PortPair &element_in(const StageElement &elem) {
    return std::visit(
        [](const auto &e) -> const PortPair & {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitterElem>) {
                return e.in;
            } else {
                return e.ports;
            }
        },
        elem);
}

const PortPair &element_out(const StageElement &elem) {
    return std::visit(
        [](const auto &e) -> const PortPair & {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitterElem>) {
                return e.out;
            } else {
                return e.ports;
            }
        },
        elem);
}

void CircuitSpec::validate() const {
    if (stages.empty()) {
        throw ValidationError("circuit '" + name + "' has no stages");
    }
    auto check_pair = [this](const PortPair &p, const std::string &where) {
        if (p[0].empty() || p[1].empty() || p[0] == p[1]) {
            throw ValidationError("circuit '" + name + "': " + where +
                                  " must name two distinct ports");
        }
    };
    const PortPair &first = element_in(stages.front());
    check_pair(first, "first stage input");
    if (source_port != first[0] && source_port != first[1]) {
        throw ValidationError("circuit '" + name + "': source port '" +
                              source_port + "' is not in the first stage pair");
    }
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const PortPair &in = element_in(stages[i]);
        const PortPair &out = element_out(stages[i]);
        check_pair(in, "stage " + std::to_string(i) + " input");
        check_pair(out, "stage " + std::to_string(i) + " output");
        if (i > 0) {
            const PortPair &prev = element_out(stages[i - 1]);
            const bool same = (in == prev) || (in[0] == prev[1] && in[1] == prev[0]);
            if (!same) {
                throw ValidationError(
                    "circuit '" + name + "': stage " + std::to_string(i) +
                    " inputs (" + in[0] + "," + in[1] +
                    ") do not match the previous stage outputs (" + prev[0] +
                    "," + prev[1] + ")");
            }
        }
        if (const auto *bs = std::get_if<BeamSplitterElem>(&stages[i])) {
            if (!(bs->theta >= 0.0 && bs->theta <= kPi / 2.0 + kInputTol)) {
                throw ValidationError("circuit '" + name + "': beam splitter '" +
                                      bs->name + "' has theta out of [0, pi/2]");
            }
        }
        if (const auto *probe = std::get_if<ProbeElem>(&stages[i])) {
            probe->cfg.validate();
            if (probe->target != 0 && probe->target != 1) {
                throw ValidationError("probe '" + probe->id +
                                      "' target index out of range");
            }
        }
        if (const auto *block = std::get_if<BlockElem>(&stages[i])) {
            if (block->target != 0 && block->target != 1) {
                throw ValidationError("block target index out of range");
            }
        }
    }
    const PortPair &last = element_out(stages.back());
    const bool final_ok = (final_basis == last) ||
                          (final_basis[0] == last[1] && final_basis[1] == last[0]);
    if (!final_ok) {
        throw ValidationError("circuit '" + name +
                              "': detection pair does not match the last stage outputs");
    }
    // Duplicate probe ids would make reading columns ambiguous.
    auto ids = probe_ids();
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw ValidationError("circuit '" + name + "' has duplicate probe ids");
    }
}

const PortPair &CircuitSpec::pair_at(std::size_t pos) const {
    if (pos > stages.size()) {
        throw ValidationError("position out of range");
    }
    if (pos == 0) {
        return element_in(stages.front());
    }
    return element_out(stages[pos - 1]);
}

std::vector<const ProbeElem *> CircuitSpec::probes() const {
    std::vector<const ProbeElem *> out;
    for (const auto &stage : stages) {
        if (const auto *probe = std::get_if<ProbeElem>(&stage)) {
            out.push_back(probe);
        }
    }
    return out;
}

std::vector<std::string> CircuitSpec::probe_ids() const {
    std::vector<std::string> out;
    for (const auto *probe : probes()) {
        out.push_back(probe->id);
    }
    return out;
}

bool CircuitSpec::has_block() const {
    return std::any_of(stages.begin(), stages.end(), [](const StageElement &s) {
        return std::holds_alternative<BlockElem>(s);
    });
}

std::optional<std::size_t>
CircuitSpec::probe_position(const std::string &probe_id) const {
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (const auto *probe = std::get_if<ProbeElem>(&stages[i])) {
            if (probe->id == probe_id) {
                return i;
            }
        }
    }
    return std::nullopt;
}

std::optional<std::size_t>
CircuitSpec::first_position_of(const std::string &port) const {
    for (std::size_t pos = 0; pos <= stages.size(); ++pos) {
        const PortPair &pair = pair_at(pos);
        if (pair[0] == port || pair[1] == port) {
            return pos;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t>
CircuitSpec::last_position_of(const std::string &port) const {
    for (std::size_t pos = stages.size() + 1; pos-- > 0;) {
        const PortPair &pair = pair_at(pos);
        if (pair[0] == port || pair[1] == port) {
            return pos;
        }
    }
    return std::nullopt;
}

std::string CircuitSpec::canonical_description() const {
    std::ostringstream os;
    os << "circuit " << name << " source " << source_port << "\n";
    for (const auto &stage : stages) {
        std::visit(
            [&os](const auto &e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, BeamSplitterElem>) {
                    os << "bs " << e.name << " (" << e.in[0] << "," << e.in[1]
                       << ")->(" << e.out[0] << "," << e.out[1] << ") theta ";
                    format_double(os, e.theta);
                    if (e.dagger) {
                        os << " dagger";
                    }
                } else if constexpr (std::is_same_v<T, PhaseShiftElem>) {
                    os << "phase " << e.ports[e.target] << " ";
                    format_double(os, e.phi);
                } else if constexpr (std::is_same_v<T, ProbeElem>) {
                    os << "probe " << e.id << " on " << e.ports[e.target]
                       << " g ";
                    format_double(os, e.cfg.g);
                    os << " sigma ";
                    format_double(os, e.cfg.sigma);
                } else {
                    os << "block " << e.ports[e.target];
                }
                os << "\n";
            },
            stage);
    }
    os << "detect (" << final_basis[0] << "," << final_basis[1] << ")\n";
    return os.str();
}

std::uint64_t CircuitSpec::fingerprint() const {
    return fnv1a64(canonical_description());
}

Mat2 bs_matrix(double theta) {
    if (!(theta >= 0.0 && theta <= kPi / 2.0 + kInputTol)) {
        throw ValidationError("beam splitter angle out of [0, pi/2]: " +
                              std::to_string(theta));
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return Mat2{{Complex(c, 0.0), Complex(0.0, s), Complex(0.0, s),
                 Complex(c, 0.0)}};
}

CircuitSpec preset_double_mzi(bool blocked, PointerConfig probe_cfg) {
    probe_cfg.validate();
    CircuitSpec spec;
    spec.name = blocked ? "double_mzi_blocked" : "double_mzi";
    spec.source_port = "L0";
    const double theta = kPi / 4.0;
    spec.stages.push_back(
        BeamSplitterElem{"BS1", {"L0", "R0"}, {"L1", "R1"}, theta, false});
    spec.stages.push_back(ProbeElem{"W1", {"L1", "R1"}, 0, probe_cfg});
    spec.stages.push_back(
        BeamSplitterElem{"BS2", {"L1", "R1"}, {"L2", "R2"}, theta, false});
    spec.stages.push_back(ProbeElem{"W2", {"L2", "R2"}, 0, probe_cfg});
    if (blocked) {
        spec.stages.push_back(BlockElem{{"L2", "R2"}, 0});
    }
    spec.stages.push_back(
        BeamSplitterElem{"BS3", {"L2", "R2"}, {"Lf", "Rf"}, theta, false});
    spec.final_basis = {"Lf", "Rf"};
    spec.validate();
    return spec;
}

CircuitSpec without_probes(const CircuitSpec &spec) {
    CircuitSpec out = spec;
    out.stages.clear();
    for (const auto &stage : spec.stages) {
        if (!std::holds_alternative<ProbeElem>(stage)) {
            out.stages.push_back(stage);
        }
    }
    out.validate();
    return out;
}

CircuitSpec reversed_circuit(const CircuitSpec &spec,
                             const std::string &new_source_port) {
    CircuitSpec out;
    out.name = spec.name + "_reversed";
    out.source_port = new_source_port;
    for (std::size_t i = spec.stages.size(); i-- > 0;) {
        StageElement stage = spec.stages[i];
        if (auto *bs = std::get_if<BeamSplitterElem>(&stage)) {
            std::swap(bs->in, bs->out);
            bs->dagger = !bs->dagger;
        }
        out.stages.push_back(std::move(stage));
    }
    out.final_basis = element_in(spec.stages.front());
    out.validate();
    return out;
}

CircuitSpec with_source(const CircuitSpec &spec, const std::string &source) {
    CircuitSpec out = spec;
    out.source_port = source;
    out.validate();
    return out;
}

namespace {

/// Reorders a state's basis to match the given port pair (which must be a
/// permutation of the state's ports).
PathState align_to(const PathState &state, const PortPair &pair) {
    if (state.port(0) == pair[0]) {
        return state;
    }
    return PathState(pair[0], pair[1], state.amp(1), state.amp(0));
}

} // namespace

namespace {

/// Shared stochastic walk through elements [0, limit). Returns the state
/// at `limit`, or nullopt when the photon was absorbed.
std::optional<PathState>
walk_stages(const CircuitSpec &spec, std::size_t limit,
            const ProbeHandler &handler, TrialRng &rng,
            const std::optional<std::string> &inject_port,
            PropagateResult *result) {
    const std::string &entry = inject_port.value_or(spec.source_port);
    // Injection at a mid-circuit port starts the walk at the first
    // position where that port is live; earlier probes stay silent.
    const auto start = spec.first_position_of(entry);
    if (!start) {
        throw ValidationError("unknown injection port '" + entry + "'");
    }
    if (*start > limit) {
        throw ValidationError("injection port '" + entry +
                              "' lies past the requested position");
    }
    const PortPair &pair0 = spec.pair_at(*start);
    const int entry_idx = entry == pair0[0] ? 0 : 1;
    PathState state = PathState::basis(pair0[0], pair0[1], entry_idx);

    std::size_t probe_index = 0;
    for (std::size_t i = 0; i < *start; ++i) {
        if (std::holds_alternative<ProbeElem>(spec.stages[i])) {
            ++probe_index;
        }
    }
    for (std::size_t i = *start; i < limit; ++i) {
        const auto &stage = spec.stages[i];
        state = align_to(state, element_in(stage));
        if (const auto *bs = std::get_if<BeamSplitterElem>(&stage)) {
            const Mat2 u = bs->matrix();
            state = PathState(
                bs->out[0], bs->out[1],
                u.at(0, 0) * state.amp(0) + u.at(0, 1) * state.amp(1),
                u.at(1, 0) * state.amp(0) + u.at(1, 1) * state.amp(1));
        } else if (const auto *ps = std::get_if<PhaseShiftElem>(&stage)) {
            state = apply_unitary(ps->matrix(), state);
        } else if (const auto *probe = std::get_if<ProbeElem>(&stage)) {
            const double p =
                std::norm(state.amp(probe->target)) / state.norm2();
            if (result != nullptr) {
                result->probe_port_occupancy[probe_index] = p;
            }
            ProbeOutcome outcome = handler(*probe, state, rng);
            if (result != nullptr) {
                result->readings[probe_index] = outcome.q;
            }
            state = std::move(outcome.collapsed);
            ++probe_index;
        } else if (const auto *block = std::get_if<BlockElem>(&stage)) {
            const double p_absorb =
                std::norm(state.amp(block->target)) / state.norm2();
            if (rng.uniform01() < p_absorb) {
                return std::nullopt; // photon absorbed
            }
            const int keep = 1 - block->target;
            state = normalize(state.with_amps(keep == 0 ? state.amp(0) : 0.0,
                                              keep == 1 ? state.amp(1) : 0.0));
        }
    }
    return state;
}

} // namespace

PropagateResult propagate(const CircuitSpec &spec, const ProbeHandler &handler,
                          TrialRng &rng,
                          const std::optional<std::string> &inject_port) {
    const std::size_t n_probes = spec.probes().size();
    PropagateResult result;
    result.readings.assign(n_probes, std::nullopt);
    result.probe_port_occupancy.assign(n_probes, std::nullopt);

    auto state = walk_stages(spec, spec.stages.size(), handler, rng,
                             inject_port, &result);
    if (!state) {
        return result;
    }
    PathState final_state = align_to(*state, spec.final_basis);
    auto [outcome_idx, collapsed] = strong_measure(final_state, rng);
    (void)collapsed;
    result.final_port = spec.final_basis[outcome_idx];
    return result;
}

std::optional<PathState>
propagate_to(const CircuitSpec &spec, std::size_t pos,
             const ProbeHandler &handler, TrialRng &rng,
             const std::optional<std::string> &inject_port) {
    if (pos > spec.stages.size()) {
        throw ValidationError("position out of range");
    }
    PropagateResult scratch;
    scratch.readings.assign(spec.probes().size(), std::nullopt);
    scratch.probe_port_occupancy.assign(spec.probes().size(), std::nullopt);
    auto state = walk_stages(spec, pos, handler, rng, inject_port, &scratch);
    if (!state) {
        return std::nullopt;
    }
    return align_to(*state, spec.pair_at(pos));
}

Mat2 transfer_matrix(const CircuitSpec &spec, std::size_t from_pos,
                     std::size_t to_pos) {
    if (from_pos > to_pos || to_pos > spec.stages.size()) {
        throw ValidationError("invalid position range for transfer matrix");
    }
    const Mat2 swap{{0.0, 1.0, 1.0, 0.0}};
    Mat2 acc = Mat2::identity();
    PortPair basis = spec.pair_at(from_pos);
    for (std::size_t i = from_pos; i < to_pos; ++i) {
        const auto &stage = spec.stages[i];
        // Account for an element whose declared input order is swapped
        // relative to the running basis.
        if (element_in(stage)[0] != basis[0]) {
            acc = swap * acc;
        }
        if (const auto *bs = std::get_if<BeamSplitterElem>(&stage)) {
            acc = bs->matrix() * acc;
        } else if (const auto *ps = std::get_if<PhaseShiftElem>(&stage)) {
            acc = ps->matrix() * acc;
        } else if (const auto *block = std::get_if<BlockElem>(&stage)) {
            const Mat2 proj = block->target == 0 ? Mat2::diag(0.0, 1.0)
                                                 : Mat2::diag(1.0, 0.0);
            acc = proj * acc;
        }
        // Probes are ignored in unitary-only propagation.
        basis = element_out(stage);
    }
    return acc;
}

Complex transfer_amplitude(const CircuitSpec &spec, const std::string &in,
                           const std::string &out) {
    const auto from_pos = spec.first_position_of(in);
    const auto to_pos = spec.last_position_of(out);
    if (!from_pos) {
        throw ValidationError("unknown port '" + in + "'");
    }
    if (!to_pos) {
        throw ValidationError("unknown port '" + out + "'");
    }
    if (*from_pos > *to_pos) {
        throw ValidationError("port '" + in + "' does not precede '" + out +
                              "'");
    }
    const Mat2 t = transfer_matrix(spec, *from_pos, *to_pos);
    const PortPair &src = spec.pair_at(*from_pos);
    const PortPair &dst = spec.pair_at(*to_pos);
    const int i = in == src[0] ? 0 : 1;
    const int j = out == dst[0] ? 0 : 1;
    return t.at(j, i);
}

PathState forward_state(const CircuitSpec &spec, std::size_t pos,
                        const std::optional<std::string> &inject_port) {
    const std::string &entry = inject_port.value_or(spec.source_port);
    const PortPair &pair0 = spec.pair_at(0);
    const int idx = entry == pair0[0] ? 0 : (entry == pair0[1] ? 1 : -1);
    if (idx < 0) {
        throw ValidationError("injection port '" + entry +
                              "' is not in the first stage pair");
    }
    const Mat2 t = transfer_matrix(spec, 0, pos);
    const PortPair &pair = spec.pair_at(pos);
    const PathState raw(pair[0], pair[1], t.at(0, idx), t.at(1, idx));
    return normalize(raw);
}

PathState backward_state(const CircuitSpec &spec, std::size_t pos,
                         const std::string &final_port) {
    const PortPair &last = spec.pair_at(spec.stages.size());
    const int idx = final_port == last[0] ? 0 : (final_port == last[1] ? 1 : -1);
    if (idx < 0) {
        throw ValidationError("post-selection port '" + final_port +
                              "' is not in the final pair");
    }
    const Mat2 t = transfer_matrix(spec, pos, spec.stages.size());
    // <final| T = (T^dag |final>)^dag: evolve the detection bra backwards.
    const Mat2 td = t.adjoint();
    const PortPair &pair = spec.pair_at(pos);
    const PathState raw(pair[0], pair[1], td.at(0, idx), td.at(1, idx));
    return normalize(raw);
}

} // namespace tsvflab
