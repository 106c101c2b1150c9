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
 * Machine-readable output schemas.
 *
 * trials.csv: one row per trial,
 *   trial_id,initial_port,final_port,absorbed,reading_<id>...,seed
 * with empty cells for probes the trial never traversed and an empty
 * final_port for absorbed trials. Doubles are written in shortest
 * round-trip form, so reruns with the same seed are byte-identical.
 */

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tsvflab/dsl.hpp"
#include "tsvflab/engine.hpp"
#include "tsvflab/slicing.hpp"

namespace tsvflab {

/// Malformed input data; the message carries row/column context.
class CsvFormatError : public ValidationError {
  public:
    CsvFormatError(std::size_t row, std::size_t col,
                   const std::string &message)
        : ValidationError("row " + std::to_string(row) + ", column " +
                          std::to_string(col) + ": " + message) {}
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::uint64_t fnv1a64_bytes(std::string_view bytes);

/// Writes content to <path>.tmp and renames it into place.
void write_file_atomic(const std::filesystem::path &path,
                       std::string_view content);

std::string read_file(const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// CSV

std::string trials_csv_header(const EnsembleResult &result);
std::string trials_csv(const EnsembleResult &result);

/// Rebuilds an ensemble from trials.csv; probe ids come from the header,
/// probe configurations and circuit context must be supplied separately
/// (see summary.json). Throws CsvFormatError on malformed content.
EnsembleResult read_trials_csv(std::string_view content);

std::string cycles_csv(const std::vector<CycleRecord> &records,
                       const std::vector<std::string> &probe_ids,
                       std::uint64_t photon_id = 0);

// ---------------------------------------------------------------------------
// JSON reports

/// Weak values, conditional probabilities, pointer-shift predictions and
/// leakage for each probe of the circuit. `post` restricts the
/// post-selected blocks to one final port; nullopt emits all final ports;
/// "none" semantics (pre-only) are selected by passing an empty string.
nlohmann::json oracle_json(const CircuitSpec &spec,
                           const std::optional<std::string> &post);

nlohmann::json summary_json(const EnsembleResult &result,
                            const CircuitSpec &spec,
                            const ExperimentAst &ast, const RunConfig &run);

nlohmann::json manifest_json(const std::string &experiment_path,
                             const std::string &experiment_text,
                             const RunConfig &run, unsigned threads,
                             const std::vector<std::string> &outputs);

nlohmann::json slice_report_json(const SliceReport &report,
                                 const EnsembleResult &result,
                                 const CircuitSpec &spec);

nlohmann::json ac_in_json(const AcInReport &report);

/// Tidy per-slice per-probe table: slice,probe,mean,se
std::string plot_data_csv(const SliceReport &report);

} // namespace tsvflab
