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
 * Subcommand entry points. Exit codes: 0 success, 1 diagnostics or
 * analysis failures, 2 I/O errors.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace tsvflab {

struct RunCmdOptions {
    std::string experiment_path;
    std::optional<std::size_t> trials;    ///< overrides the run block
    std::optional<std::uint64_t> seed;    ///< overrides the run block
    std::string out_dir = ".";
    unsigned threads = 1;
};

struct OracleCmdOptions {
    std::string experiment_path;
    /// Final port name, or "none" for pre-selected-only expectations.
    std::string post = "";
};

struct SliceCmdOptions {
    std::string input_csv;
    std::string by = "final"; ///< "final" or "initial"
    std::optional<double> subsample_fraction;
    std::uint64_t subsample_seed = 1;
    bool ac_in = false;
    std::optional<std::string> emit_plot_data;
    /// Overrides the summary.json expected next to the input CSV.
    std::optional<std::string> summary_path;
};

int cmd_run(const RunCmdOptions &opts, std::ostream &out, std::ostream &err);
int cmd_oracle(const OracleCmdOptions &opts, std::ostream &out,
               std::ostream &err);
int cmd_slice(const SliceCmdOptions &opts, std::ostream &out,
              std::ostream &err);

} // namespace tsvflab
