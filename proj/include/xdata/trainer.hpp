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

#include <chrono>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xdata/dataset.hpp"
#include "xdata/eval.hpp"
#include "xdata/model.hpp"

namespace xdata {

struct CdlcConfig {
  Index select_per_task = 1000;
  std::optional<int> max_iterations;
  std::map<std::string, double> min_confidence;  // by task name
  bool retrain_from_scratch = true;
  bool eval_every_iteration = true;
  NetworkConfig network;

  void validate() const;
};

struct TaskProgress {
  Index filled = 0;
  /// Confidence of the last accepted cell; NaN when nothing was filled.
  double boundary_confidence = std::numeric_limits<double>::quiet_NaN();
  Index remaining = 0;
};

struct IterationRecord {
  int iteration = 0;
  std::vector<TaskProgress> tasks;
  std::optional<MetricReport> metrics;
  std::chrono::duration<double> duration{};
};

enum class CdlcStatus { Completed, MaxIterations, Stalled };

const char* to_string(CdlcStatus status);

struct CdlcResult {
  MultiTargetDataset completed;  // same space as the input dataset
  std::vector<IterationRecord> iterations;
  std::vector<PseudoLabelAssignment> assignments;
  CdlcStatus status = CdlcStatus::Completed;
  std::vector<std::string> warnings;
};

/// One candidate cell for selection.
struct Candidate {
  Index instance = 0;
  Index task = 0;
  double value = 0.0;  // decoded label in target units
  double confidence = 0.0;
};

/// The min(k, n) most confident candidates, ties to the lower instance index.
/// Candidates below `min_confidence` are discarded first.
std::vector<Candidate> select_top_k(std::vector<Candidate> candidates, Index k,
                                    std::optional<double> min_confidence = std::nullopt);

/// Cross-data label completion. `ds` (and `eval_set`) are in model space,
/// i.e. already transformed by `scaling`; assignments carry target units.
/// Each round trains on every instance with at least one label, predicts the
/// undefined cells and fills the k most confident cells of every task.
CdlcResult run_cdlc(const MultiTargetDataset& ds, const CdlcConfig& config, const Standardizer& scaling,
                    const MultiTargetDataset* eval_set = nullptr);

/// Copies `ds` (target units) and writes every assignment into it.
MultiTargetDataset apply_assignments(const MultiTargetDataset& ds, const std::vector<PseudoLabelAssignment>& assignments);

}  // namespace xdata
