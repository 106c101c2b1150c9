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

#include "tsvflab/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tsvflab/tsvf.hpp"
#include "tsvflab/version.hpp"

namespace tsvflab {

namespace {

using nlohmann::json;

json complex_json(Complex z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

double parse_csv_double(std::string_view cell, std::size_t row,
                        std::size_t col) {
    double value = 0.0;
    const char *begin = cell.data();
    const char *end = cell.data() + cell.size();
    auto [ptr, err] = std::from_chars(begin, end, value);
    if (err != std::errc{} || ptr != end) {
        throw CsvFormatError(row, col,
                             "malformed number '" + std::string(cell) + "'");
    }
    return value;
}

std::uint64_t parse_csv_u64(std::string_view cell, std::size_t row,
                            std::size_t col) {
    std::uint64_t value = 0;
    const char *begin = cell.data();
    const char *end = cell.data() + cell.size();
    auto [ptr, err] = std::from_chars(begin, end, value);
    if (err != std::errc{} || ptr != end) {
        throw CsvFormatError(row, col, "malformed unsigned integer '" +
                                           std::string(cell) + "'");
    }
    return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, err] = std::to_chars(buf, buf + sizeof(buf), v);
    if (err != std::errc{}) {
        return "0";
    }
    return std::string(buf, ptr - buf);
}

std::uint64_t fnv1a64_bytes(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

void write_file_atomic(const std::filesystem::path &path,
                       std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + tmp.string() +
                                     "' for writing");
        }
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() +
                                 "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string trials_csv_header(const EnsembleResult &result) {
    std::string header = "trial_id,initial_port,final_port,absorbed";
    for (const auto &probe : result.probes) {
        header += ",reading_" + probe.id;
    }
    header += ",seed";
    return header;
}

std::string trials_csv(const EnsembleResult &result) {
    std::string out = trials_csv_header(result);
    out += '\n';
    for (const TrialRecord &t : result.trials) {
        out += std::to_string(t.trial_id);
        out += ',';
        out += t.initial_port;
        out += ',';
        if (t.final_port) {
            out += *t.final_port;
        }
        out += ',';
        out += t.absorbed() ? '1' : '0';
        for (std::size_t p = 0; p < result.probes.size(); ++p) {
            out += ',';
            if (p < t.readings.size() && t.readings[p]) {
                out += format_double(*t.readings[p]);
            }
        }
        out += ',';
        out += std::to_string(t.seed);
        out += '\n';
    }
    return out;
}

EnsembleResult read_trials_csv(std::string_view content) {
    EnsembleResult result;
    std::size_t line_start = 0;
    std::size_t row = 0;
    std::size_t n_probes = 0;
    while (line_start < content.size()) {
        std::size_t line_end = content.find('\n', line_start);
        if (line_end == std::string_view::npos) {
            line_end = content.size();
        }
        const std::string_view line =
            content.substr(line_start, line_end - line_start);
        line_start = line_end + 1;
        ++row;
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (row == 1) {
            if (cells.size() < 5 || cells[0] != "trial_id" ||
                cells[1] != "initial_port" || cells[2] != "final_port" ||
                cells[3] != "absorbed" || cells.back() != "seed") {
                throw CsvFormatError(1, 1, "unrecognized header");
            }
            for (std::size_t i = 4; i + 1 < cells.size(); ++i) {
                const std::string_view cell = cells[i];
                if (cell.substr(0, 8) != "reading_" || cell.size() <= 8) {
                    throw CsvFormatError(1, i + 1,
                                         "expected a reading_<probe> column");
                }
                ProbeInfo info;
                info.id = std::string(cell.substr(8));
                result.probes.push_back(std::move(info));
            }
            n_probes = result.probes.size();
            continue;
        }
        if (cells.size() != 5 + n_probes) {
            throw CsvFormatError(row, 1,
                                 "expected " + std::to_string(5 + n_probes) +
                                     " cells, got " +
                                     std::to_string(cells.size()));
        }
        TrialRecord t;
        t.trial_id = parse_csv_u64(cells[0], row, 1);
        t.initial_port = std::string(cells[1]);
        if (t.initial_port.empty()) {
            throw CsvFormatError(row, 2, "initial_port must not be empty");
        }
        const std::string_view final_port = cells[2];
        const std::string_view absorbed = cells[3];
        if (absorbed != "0" && absorbed != "1") {
            throw CsvFormatError(row, 4, "absorbed must be 0 or 1");
        }
        if (absorbed == "0") {
            if (final_port.empty()) {
                throw CsvFormatError(row, 3,
                                     "non-absorbed trial lacks a final port");
            }
            t.final_port = std::string(final_port);
        } else if (!final_port.empty()) {
            throw CsvFormatError(row, 3,
                                 "absorbed trial must have an empty final port");
        }
        for (std::size_t p = 0; p < n_probes; ++p) {
            const std::string_view cell = cells[4 + p];
            if (cell.empty()) {
                t.readings.push_back(std::nullopt);
            } else {
                t.readings.push_back(
                    parse_csv_double(cell, row, 5 + p));
            }
        }
        t.seed = parse_csv_u64(cells.back(), row, cells.size());
        if (t.absorbed()) {
            ++result.absorbed_count;
        }
        result.trials.push_back(std::move(t));
    }
    if (row == 0) {
        throw CsvFormatError(1, 1, "empty file");
    }
    result.requested_n = result.trials.size();
    result.occupancy_sum.assign(result.probes.size(), 0.0);
    result.occupancy_n.assign(result.probes.size(), 0);
    return result;
}

std::string cycles_csv(const std::vector<CycleRecord> &records,
                       const std::vector<std::string> &probe_ids,
                       std::uint64_t photon_id) {
    std::string out = "photon_id,cycle_index,direction,start_port,end_port";
    for (const auto &id : probe_ids) {
        out += ",reading_" + id;
    }
    out += ",seed\n";
    for (const CycleRecord &c : records) {
        out += std::to_string(photon_id);
        out += ',';
        out += std::to_string(c.cycle_index);
        out += ',';
        out += c.direction == CycleRecord::Direction::Forward ? "forward"
                                                              : "backward";
        out += ',';
        out += c.start_port;
        out += ',';
        out += c.end_port;
        for (std::size_t p = 0; p < probe_ids.size(); ++p) {
            out += ',';
            if (p < c.readings.size() && c.readings[p]) {
                out += format_double(*c.readings[p]);
            }
        }
        out += ',';
        out += std::to_string(c.seed);
        out += '\n';
    }
    return out;
}

nlohmann::json oracle_json(const CircuitSpec &spec,
                           const std::optional<std::string> &post) {
    json out;
    out["circuit"] = spec.name;
    std::vector<std::string> posts;
    const bool pre_only = post.has_value() && post->empty();
    if (!pre_only) {
        if (post) {
            posts.push_back(*post);
        } else {
            posts = {spec.final_basis[0], spec.final_basis[1]};
        }
    }
    json probes = json::array();
    for (const ProbeElem *probe : spec.probes()) {
        json entry;
        entry["id"] = probe->id;
        entry["port"] = probe->ports[probe->target];
        entry["g"] = probe->cfg.g;
        entry["sigma"] = probe->cfg.sigma;
        entry["decoherence_factor"] = decoherence_factor(probe->cfg);
        const auto pos = spec.probe_position(probe->id).value();
        const PathState pre = forward_state(spec, pos);
        entry["pre_only_shift"] =
            expected_pointer_shift(pre, probe->projector(), probe->cfg);
        json post_block = json::object();
        for (const std::string &port : posts) {
            json block;
            try {
                const TwoStateVector tsv = tsv_at(spec, pos, port);
                const auto wv = projector_weak_values(tsv);
                const PortPair &pair = spec.pair_at(pos);
                block["weak_values"] = {
                    {pair[0], complex_json(wv[0].value)},
                    {pair[1], complex_json(wv[1].value)},
                };
                const Observable obs = Observable::port_basis(pair);
                block["abl"] = {
                    {pair[0], abl_probability(tsv, obs, 0)},
                    {pair[1], abl_probability(tsv, obs, 1)},
                };
                block["expected_shift"] = expected_pointer_shift(
                    tsv, probe->projector(), probe->cfg);
                const int idx = probe->target;
                block["weak_limit_shift"] =
                    probe->cfg.g *
                    weak_value(tsv, idx == 0 ? Mat2::diag(1.0, 0.0)
                                             : Mat2::diag(0.0, 1.0))
                        .value.real();
            } catch (const UndefinedConditionalError &err) {
                block = json::object();
                block["undefined"] = true;
                block["reason"] = err.what();
            }
            post_block[port] = std::move(block);
        }
        if (!posts.empty()) {
            entry["post"] = std::move(post_block);
        }
        probes.push_back(std::move(entry));
    }
    out["probes"] = std::move(probes);
    const auto all_probes = spec.probes();
    if (!all_probes.empty()) {
        out["leakage_probability"] =
            leakage_probability(all_probes.front()->cfg);
    }
    return out;
}

nlohmann::json summary_json(const EnsembleResult &result,
                            const CircuitSpec &spec,
                            const ExperimentAst &ast, const RunConfig &run) {
    json out;
    out["tool_version"] = kToolVersion;
    out["circuit"] = result.circuit_name;
    out["experiment"] = serialize(ast);
    out["fingerprint"] = result.fingerprint;
    out["master_seed"] = result.master_seed;
    out["trials"] = result.requested_n;
    out["absorbed_count"] = result.absorbed_count;
    json finals = json::object();
    for (const auto &[port, count] : counts_by_final(result)) {
        finals[port] = count;
    }
    out["final_counts"] = std::move(finals);

    // Unsliced per-probe statistics.
    json probes = json::array();
    for (std::size_t p = 0; p < result.probes.size(); ++p) {
        const ProbeInfo &info = result.probes[p];
        double sum = 0.0;
        double sum_sq = 0.0;
        std::size_t count = 0;
        for (const TrialRecord &t : result.trials) {
            if (p < t.readings.size() && t.readings[p]) {
                sum += *t.readings[p];
                sum_sq += *t.readings[p] * *t.readings[p];
                ++count;
            }
        }
        json entry;
        entry["id"] = info.id;
        entry["port"] = info.port;
        entry["g"] = info.cfg.g;
        entry["sigma"] = info.cfg.sigma;
        entry["count"] = count;
        if (count > 0) {
            entry["mean_reading"] = sum / static_cast<double>(count);
        } else {
            entry["mean_reading"] = nullptr;
        }
        if (count > 1) {
            const double var =
                (sum_sq - sum * sum / static_cast<double>(count)) /
                static_cast<double>(count - 1);
            entry["std_error"] = std::sqrt(std::max(0.0, var) /
                                           static_cast<double>(count));
        } else {
            entry["std_error"] = nullptr;
        }
        if (p < result.occupancy_n.size() && result.occupancy_n[p] > 0) {
            entry["port_occupancy"] = result.mean_occupancy(p);
        } else {
            entry["port_occupancy"] = nullptr;
        }
        probes.push_back(std::move(entry));
    }
    out["probes"] = std::move(probes);
    // Dark-port occupancy: the second probe of the preset geometry sits on
    // the interference exit's dark companion.
    if (result.probes.size() >= 2 && result.occupancy_n[1] > 0) {
        out["leakage_fraction"] = result.mean_occupancy(1);
    } else {
        out["leakage_fraction"] = nullptr;
    }
    json run_block;
    run_block["trials"] = run.trials;
    run_block["seed"] = run.seed;
    run_block["cycles"] =
        run.cycles ? json(*run.cycles) : json(nullptr);
    run_block["subsample"] =
        run.subsample ? json(*run.subsample) : json(nullptr);
    out["run"] = std::move(run_block);
    out["oracle"] = oracle_json(spec, std::nullopt);
    return out;
}

nlohmann::json manifest_json(const std::string &experiment_path,
                             const std::string &experiment_text,
                             const RunConfig &run, unsigned threads,
                             const std::vector<std::string> &outputs) {
    json out;
    out["tool_version"] = kToolVersion;
    out["experiment_file"] = experiment_path;
    char hashbuf[32];
    std::snprintf(hashbuf, sizeof(hashbuf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64_bytes(experiment_text)));
    out["experiment_hash"] = hashbuf;
    json resolved;
    resolved["trials"] = run.trials;
    resolved["seed"] = run.seed;
    resolved["cycles"] = run.cycles ? json(*run.cycles) : json(nullptr);
    resolved["subsample"] =
        run.subsample ? json(*run.subsample) : json(nullptr);
    resolved["threads"] = threads;
    out["resolved"] = std::move(resolved);
    out["master_seed"] = run.seed;
    out["outputs"] = outputs;
    return out;
}

nlohmann::json slice_report_json(const SliceReport &report,
                                 const EnsembleResult &result,
                                 const CircuitSpec &spec) {
    json slices = json::array();
    for (std::size_t s = 0; s < report.slice_labels.size(); ++s) {
        json slice_entry;
        slice_entry["label"] = report.slice_labels[s];
        slice_entry["count"] = report.counts[s];
        json probes = json::array();
        for (std::size_t p = 0; p < report.probe_ids.size(); ++p) {
            const ProbeStats &st = report.stats[s][p];
            json entry;
            entry["id"] = report.probe_ids[p];
            entry["count"] = st.count;
            entry["mean"] = st.count > 0 ? json(st.mean) : json(nullptr);
            entry["std_error"] =
                st.se_defined ? json(st.std_error) : json(nullptr);
            // Oracle comparison columns: the exact conditional shift and
            // its weak limit for slicing by final port.
            json oracle_shift = nullptr;
            json weak_limit = nullptr;
            const std::string &label = report.slice_labels[s];
            const auto spec_probes = spec.probes();
            if (p < spec_probes.size() &&
                (label == spec.final_basis[0] ||
                 label == spec.final_basis[1])) {
                const auto *probe = spec_probes[p];
                try {
                    const TwoStateVector tsv =
                        tsv_at_probe(spec, probe->id, label);
                    oracle_shift = expected_pointer_shift(
                        tsv, probe->projector(), probe->cfg);
                    weak_limit =
                        probe->cfg.g *
                        weak_value(tsv, probe->target == 0
                                            ? Mat2::diag(1.0, 0.0)
                                            : Mat2::diag(0.0, 1.0))
                            .value.real();
                } catch (const UndefinedConditionalError &) {
                    // leave nulls
                }
            }
            entry["oracle_shift"] = oracle_shift;
            entry["weak_limit_shift"] = weak_limit;
            probes.push_back(std::move(entry));
        }
        slice_entry["probes"] = std::move(probes);
        slices.push_back(std::move(slice_entry));
    }
    json out;
    out["slices"] = std::move(slices);
    json z = json::object();
    for (std::size_t p = 0; p < report.probe_ids.size(); ++p) {
        z[report.probe_ids[p]] =
            std::isnan(report.z[p]) ? json(nullptr) : json(report.z[p]);
    }
    out["z"] = std::move(z);
    out["flags"] = report.flags;
    if (result.subsample) {
        out["subsample"] = {{"fraction", result.subsample->fraction},
                            {"seed", result.subsample->seed},
                            {"retained", result.trials.size()}};
    } else {
        out["subsample"] = nullptr;
    }
    return out;
}

nlohmann::json ac_in_json(const AcInReport &report) {
    json out;
    out["n_classified"] = report.n_classified;
    out["ac_count"] = report.ac_count;
    out["in_count"] = report.in_count;
    out["threshold"] = report.threshold;
    out["match_fraction"] = report.match_fraction;
    out["match_std_error"] = report.match_std_error;
    out["p_shifted_given_partner"] = report.p_shifted_given_partner;
    out["p_shifted_given_other"] = report.p_shifted_given_other;
    out["predicted_match_tsvf"] = report.predicted_match_tsvf;
    out["predicted_match_lambda2"] = report.predicted_match_lambda2;
    out["z_tsvf"] = report.z_tsvf;
    out["z_lambda2"] = report.z_lambda2;
    out["verdict"] = report.verdict;
    return out;
}

std::string plot_data_csv(const SliceReport &report) {
    std::string out = "slice,probe,mean,se\n";
    for (std::size_t s = 0; s < report.slice_labels.size(); ++s) {
        for (std::size_t p = 0; p < report.probe_ids.size(); ++p) {
            const ProbeStats &st = report.stats[s][p];
            out += report.slice_labels[s];
            out += ',';
            out += report.probe_ids[p];
            out += ',';
            if (st.count > 0) {
                out += format_double(st.mean);
            }
            out += ',';
            if (st.se_defined) {
                out += format_double(st.std_error);
            }
            out += '\n';
        }
    }
    return out;
}

} // namespace tsvflab
