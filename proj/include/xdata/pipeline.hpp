/*
 * Copyright 2026 The xdata Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "xdata/config.hpp"
#include "xdata/eval.hpp"
#include "xdata/trainer.hpp"

namespace xdata {

struct PipelineOutcome {
  CdlcResult cdlc;                       // model space
  MultiTargetDataset completed;          // target units, as written to completed.arff
  std::optional<LabelGrid> withheld;     // labels before drop-out, when simulated
  std::vector<PseudoLabelQuality> pseudo_quality;
  std::optional<MetricReport> final_metrics;  // model retrained on the completed data
};

/// Reads the configured files, optionally drops labels, runs label completion
/// and writes completed.arff, assignments.csv, iterations.csv, report.txt and
/// scatter_<task>.csv into the output directory. Progress goes to `log`.
PipelineOutcome run_pipeline(const RunConfig& config, std::ostream* log = nullptr);

/// Source files as configured, parsed. Throws DataError naming the path.
std::vector<SourceFile> load_sources(const RunConfig& config);

void write_assignments_csv(std::ostream& out, const MultiTargetDataset& ds,
                           const std::vector<PseudoLabelAssignment>& assignments);
void write_iterations_csv(std::ostream& out, const std::vector<TaskSchema>& tasks,
                          const std::vector<IterationRecord>& records);

/// CSV field, quoted when it holds a comma, quote or newline.
std::string csv_field(const std::string& text);

}  // namespace xdata
