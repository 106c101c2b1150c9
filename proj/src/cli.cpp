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

#include "tsvflab/cli.hpp"

#include <filesystem>
#include <iostream>

#include "tsvflab/output.hpp"
#include "tsvflab/slicing.hpp"

namespace tsvflab {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitIo = 2;

void print_diagnostics(const std::string &path,
                       const std::vector<ParseDiagnostic> &diags,
                       std::ostream &err) {
    for (const ParseDiagnostic &d : diags) {
        err << path << ":" << d.line << ":" << d.col << ": "
            << (d.severity == ParseDiagnostic::Severity::Error ? "error"
                                                               : "warning")
            << ": " << d.message << "\n";
    }
}

struct LoadedExperiment {
    std::string text;
    ExperimentAst ast;
    CircuitSpec spec;
    RunConfig run;
};

/// Reads, parses and lowers an experiment file. Returns nullopt and sets
/// exit_code on failure.
std::optional<LoadedExperiment> load_experiment(const std::string &path,
                                                std::ostream &err,
                                                int &exit_code) {
    LoadedExperiment loaded;
    try {
        loaded.text = read_file(path);
    } catch (const std::exception &ex) {
        err << "error: " << ex.what() << "\n";
        exit_code = kExitIo;
        return std::nullopt;
    }
    ParseResult parsed = parse(loaded.text);
    if (!parsed.ok()) {
        print_diagnostics(path, parsed.diagnostics, err);
        exit_code = kExitDiagnostics;
        return std::nullopt;
    }
    loaded.ast = std::move(*parsed.ast);
    LowerResult lowered = lower(loaded.ast);
    if (!lowered.ok()) {
        print_diagnostics(path, lowered.diagnostics, err);
        exit_code = kExitDiagnostics;
        return std::nullopt;
    }
    loaded.spec = std::move(*lowered.spec);
    loaded.run = lowered.run;
    return loaded;
}

int run_cycle_mode(const LoadedExperiment &exp, const RunCmdOptions &opts,
                   const std::filesystem::path &out_dir, std::ostream &err) {
    const std::size_t photons = exp.run.trials;
    const std::size_t cycles = *exp.run.cycles;
    const auto probe_ids = exp.spec.probe_ids();
    std::string csv;
    json photon_summaries = json::array();
    for (std::size_t p = 0; p < photons; ++p) {
        const std::uint64_t photon_seed =
            photons == 1 ? exp.run.seed : counter_hash(exp.run.seed, p);
        const auto records =
            run_single_photon_cycles(exp.spec, cycles, photon_seed);
        std::string chunk = cycles_csv(records, probe_ids, p);
        if (p == 0) {
            csv = std::move(chunk);
        } else {
            // Strip the repeated header.
            csv += chunk.substr(chunk.find('\n') + 1);
        }
        json entry;
        entry["photon_id"] = p;
        entry["passes"] = records.size();
        entry["match_probability"] =
            match_probability(exp.spec, records, records.size());
        photon_summaries.push_back(std::move(entry));
    }
    json summary;
    summary["circuit"] = exp.spec.name;
    summary["experiment"] = serialize(exp.ast);
    summary["mode"] = "cycles";
    summary["cycles"] = cycles;
    summary["photons"] = photons;
    summary["master_seed"] = exp.run.seed;
    summary["photon_summaries"] = std::move(photon_summaries);
    summary["oracle"] = oracle_json(exp.spec, std::nullopt);

    try {
        write_file_atomic(out_dir / "cycles.csv", csv);
        write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
        const json manifest = manifest_json(
            opts.experiment_path, exp.text, exp.run, opts.threads,
            {"cycles.csv", "summary.json", "manifest.json"});
        write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception &ex) {
        err << "error: " << ex.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

} // namespace

int cmd_run(const RunCmdOptions &opts, std::ostream &out, std::ostream &err) {
    (void)out;
    int exit_code = kExitOk;
    auto loaded = load_experiment(opts.experiment_path, err, exit_code);
    if (!loaded) {
        return exit_code;
    }
    if (opts.trials) {
        loaded->run.trials = *opts.trials;
    }
    if (opts.seed) {
        loaded->run.seed = *opts.seed;
    }
    const std::filesystem::path out_dir(opts.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        err << "error: cannot create output directory '" << opts.out_dir
            << "': " << ec.message() << "\n";
        return kExitIo;
    }

    if (loaded->run.cycles) {
        return run_cycle_mode(*loaded, opts, out_dir, err);
    }

    const EnsembleResult result = run_ensemble(
        loaded->spec, loaded->run.trials, loaded->run.seed, opts.threads);
    const json summary =
        summary_json(result, loaded->spec, loaded->ast, loaded->run);
    try {
        write_file_atomic(out_dir / "trials.csv", trials_csv(result));
        write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
        const json manifest = manifest_json(
            opts.experiment_path, loaded->text, loaded->run, opts.threads,
            {"trials.csv", "summary.json", "manifest.json"});
        write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception &ex) {
        err << "error: " << ex.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_oracle(const OracleCmdOptions &opts, std::ostream &out,
               std::ostream &err) {
    int exit_code = kExitOk;
    auto loaded = load_experiment(opts.experiment_path, err, exit_code);
    if (!loaded) {
        return exit_code;
    }
    std::optional<std::string> post;
    if (opts.post == "none") {
        post = std::string(); // pre-only expectations
    } else if (!opts.post.empty()) {
        if (opts.post != loaded->spec.final_basis[0] &&
            opts.post != loaded->spec.final_basis[1]) {
            err << "error: '" << opts.post << "' is not a final port of '"
                << loaded->spec.name << "'\n";
            return kExitDiagnostics;
        }
        post = opts.post;
    }
    out << oracle_json(loaded->spec, post).dump(2) << "\n";
    return kExitOk;
}

int cmd_slice(const SliceCmdOptions &opts, std::ostream &out,
              std::ostream &err) {
    std::string csv_text;
    try {
        csv_text = read_file(opts.input_csv);
    } catch (const std::exception &ex) {
        err << "error: " << ex.what() << "\n";
        return kExitIo;
    }
    EnsembleResult result;
    try {
        result = read_trials_csv(csv_text);
    } catch (const CsvFormatError &ex) {
        err << opts.input_csv << ": error: " << ex.what() << "\n";
        return kExitDiagnostics;
    }

    // The sibling summary.json carries the probe configurations and the
    // canonical experiment text needed for oracle comparisons.
    const std::filesystem::path summary_path =
        opts.summary_path
            ? std::filesystem::path(*opts.summary_path)
            : std::filesystem::path(opts.input_csv).parent_path() /
                  "summary.json";
    json summary;
    try {
        summary = json::parse(read_file(summary_path));
    } catch (const std::exception &ex) {
        err << "error: cannot load run context from '"
            << summary_path.string() << "': " << ex.what()
            << " (pass --summary to point at the run's summary.json)\n";
        return kExitDiagnostics;
    }

    RunConfig run_cfg;
    CircuitSpec spec;
    try {
        const std::string experiment_text = summary.at("experiment");
        ParseResult parsed = parse(experiment_text);
        if (!parsed.ok()) {
            throw ValidationError("embedded experiment text does not parse");
        }
        LowerResult lowered = lower(*parsed.ast);
        if (!lowered.ok()) {
            throw ValidationError("embedded experiment text does not lower");
        }
        spec = std::move(*lowered.spec);
        run_cfg = lowered.run;
    } catch (const std::exception &ex) {
        err << "error: invalid summary context: " << ex.what() << "\n";
        return kExitDiagnostics;
    }

    // Patch the CSV-derived skeleton with the circuit context.
    result.circuit_name = spec.name;
    result.source_port = spec.source_port;
    result.final_basis = spec.final_basis;
    result.fingerprint = spec.fingerprint();
    {
        const auto spec_probes = spec.probes();
        if (spec_probes.size() != result.probes.size()) {
            err << "error: probe columns do not match the experiment ("
                << result.probes.size() << " vs " << spec_probes.size()
                << ")\n";
            return kExitDiagnostics;
        }
        for (std::size_t i = 0; i < spec_probes.size(); ++i) {
            if (spec_probes[i]->id != result.probes[i].id) {
                err << "error: probe column '" << result.probes[i].id
                    << "' does not match experiment probe '"
                    << spec_probes[i]->id << "'\n";
                return kExitDiagnostics;
            }
            result.probes[i].port =
                spec_probes[i]->ports[spec_probes[i]->target];
            result.probes[i].cfg = spec_probes[i]->cfg;
        }
    }

    std::optional<double> fraction = opts.subsample_fraction;
    if (!fraction && run_cfg.subsample) {
        fraction = run_cfg.subsample;
    }
    try {
        if (fraction) {
            result = subsample(result, *fraction, opts.subsample_seed);
        }
        SliceCriterion criterion = opts.by == "initial"
                                       ? SliceCriterion::initial_port()
                                       : SliceCriterion::final_port();
        const Slices slices = slice(result, criterion);
        const SliceReport report = slice_means(result, slices);
        json report_json = slice_report_json(report, result, spec);
        report_json["criterion"] = criterion.name;
        if (opts.ac_in) {
            report_json["ac_in"] = ac_in_json(ac_in_test(result, spec));
        }
        if (opts.emit_plot_data) {
            write_file_atomic(*opts.emit_plot_data, plot_data_csv(report));
        }
        out << report_json.dump(2) << "\n";
    } catch (const ValidationError &ex) {
        err << "error: " << ex.what() << "\n";
        return kExitDiagnostics;
    } catch (const std::exception &ex) {
        err << "error: " << ex.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

} // namespace tsvflab
