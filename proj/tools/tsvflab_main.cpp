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

#include <iostream>

#include <CLI11.hpp>

#include "tsvflab/cli.hpp"
#include "tsvflab/version.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Weak-measurement interferometer simulator and analyzer"};
    app.set_version_flag("--version", tsvflab::kToolVersion);
    app.require_subcommand(1);

    tsvflab::RunCmdOptions run_opts;
    std::size_t trials_flag = 0;
    std::uint64_t seed_flag = 0;
    auto *run = app.add_subcommand(
        "run", "Execute an experiment and write trials.csv / summary.json / "
               "manifest.json");
    run->add_option("--experiment", run_opts.experiment_path,
                    "Experiment definition file (.exp)")
        ->required();
    auto *trials_opt =
        run->add_option("--trials", trials_flag,
                        "Override the run block's trial count");
    auto *seed_opt =
        run->add_option("--seed", seed_flag, "Override the run block's seed");
    run->add_option("--out", run_opts.out_dir, "Output directory")
        ->capture_default_str();
    run->add_option("--threads", run_opts.threads,
                    "Worker threads (results are identical for any count)")
        ->envname("TSVFLAB_THREADS")
        ->capture_default_str();

    tsvflab::OracleCmdOptions oracle_opts;
    auto *oracle = app.add_subcommand(
        "oracle",
        "Print exact weak values, conditional probabilities and pointer "
        "shifts for an experiment");
    oracle->add_option("--experiment", oracle_opts.experiment_path,
                       "Experiment definition file (.exp)")
        ->required();
    oracle->add_option("--post", oracle_opts.post,
                       "Post-selected final port, or 'none' for "
                       "pre-selected-only expectations");

    tsvflab::SliceCmdOptions slice_opts;
    auto *slice = app.add_subcommand(
        "slice", "Regroup a run's recorded readings into sub-ensembles and "
                 "print the statistics report");
    slice->add_option("--input", slice_opts.input_csv, "trials.csv from a run")
        ->required();
    slice->add_option("--by", slice_opts.by, "Slice key: final | initial")
        ->check(CLI::IsMember({"final", "initial"}))
        ->capture_default_str();
    double subsample_flag = 0.0;
    auto *subsample_opt = slice->add_option(
        "--subsample", subsample_flag,
        "Analyze a seeded random fraction of the trials (0, 1]");
    slice->add_option("--subsample-seed", slice_opts.subsample_seed,
                      "Seed for --subsample")
        ->capture_default_str();
    slice->add_flag("--ac-in", slice_opts.ac_in,
                    "Include the accurate/inaccurate match-class hypothesis "
                    "test");
    std::string plot_path;
    auto *plot_opt = slice->add_option(
        "--emit-plot-data", plot_path,
        "Write a tidy slice,probe,mean,se CSV for external plotting");
    std::string summary_path;
    auto *summary_opt = slice->add_option(
        "--summary", summary_path,
        "summary.json of the run (defaults to the file next to --input)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (*trials_opt) {
            run_opts.trials = trials_flag;
        }
        if (*seed_opt) {
            run_opts.seed = seed_flag;
        }
        return tsvflab::cmd_run(run_opts, std::cout, std::cerr);
    }
    if (oracle->parsed()) {
        return tsvflab::cmd_oracle(oracle_opts, std::cout, std::cerr);
    }
    if (*subsample_opt) {
        slice_opts.subsample_fraction = subsample_flag;
    }
    if (*plot_opt) {
        slice_opts.emit_plot_data = plot_path;
    }
    if (*summary_opt) {
        slice_opts.summary_path = summary_path;
    }
    return tsvflab::cmd_slice(slice_opts, std::cout, std::cerr);
}
