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

#include "xdata/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xdata/uncertainty.hpp"

namespace xdata {

void CdlcConfig::validate() const {
  if (select_per_task < 1) throw std::invalid_argument("select_per_task must be at least 1");
  if (max_iterations && *max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  network.validate();
}

const char* to_string(CdlcStatus status) {
  switch (status) {
    case CdlcStatus::Completed: return "completed";
    case CdlcStatus::MaxIterations: return "max_iterations";
    case CdlcStatus::Stalled: return "stalled";
  }
  return "?";
}

namespace {

bool more_confident(const Candidate& a, const Candidate& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return a.instance < b.instance;
}

}  // namespace

std::vector<Candidate> select_top_k(std::vector<Candidate> candidates, Index k, std::optional<double> min_confidence) {
  if (min_confidence) {
    std::erase_if(candidates, [&](const Candidate& c) { return !(c.confidence >= *min_confidence); });
  }
  const auto keep = static_cast<std::size_t>(std::min<Index>(k, static_cast<Index>(candidates.size())));
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                    more_confident);
  candidates.resize(keep);
  return candidates;
}

CdlcResult run_cdlc(const MultiTargetDataset& ds, const CdlcConfig& config, const Standardizer& scaling,
                    const MultiTargetDataset* eval_set) {
  config.validate();
  if (eval_set) check_compatible(ds, *eval_set);
  if (split(ds).labeled.empty()) throw DataError("no labeled instances to start from");

  CdlcResult result;
  result.completed = ds;
  MultiTargetDataset& work = result.completed;
  const Index tasks = ds.num_tasks();
  std::optional<MtShlNetwork<double>> previous;

  for (int iteration = 0;; ++iteration) {
    const SplitView view = split(work);
    if (view.incomplete.empty()) {
      result.status = CdlcStatus::Completed;
      break;
    }
    if (config.max_iterations && iteration >= *config.max_iterations) {
      result.status = CdlcStatus::MaxIterations;
      break;
    }
    const auto started = std::chrono::steady_clock::now();

    NetworkConfig net_config = config.network;
    net_config.seed = config.network.seed + static_cast<std::uint64_t>(iteration);
    Rng rng(net_config.seed);
    MtShlNetwork<double> net = (config.retrain_from_scratch || !previous)
                                   ? init_network<double>(net_config, ds.num_features(), ds.tasks)
                                   : *previous;
    TrainReport train_report;
    net = train(net, Eigen::MatrixXd(work.features(view.labeled, Eigen::all)), work.labels.select_rows(view.labeled),
                rng, &train_report);
    for (auto& w : train_report.warnings) {
      result.warnings.push_back("iteration " + std::to_string(iteration) + ": " + w);
    }

    IterationRecord record;
    record.iteration = iteration;
    if (eval_set && config.eval_every_iteration) record.metrics = evaluate(net, *eval_set, &scaling);

    const Eigen::MatrixXd x_incomplete = work.features(view.incomplete, Eigen::all);
    const auto predictions = predict(net, x_incomplete, rng, &scaling);

    record.tasks.resize(static_cast<std::size_t>(tasks));
    for (Index m = 0; m < tasks; ++m) {
      std::vector<Candidate> candidates;
      for (std::size_t r = 0; r < view.incomplete.size(); ++r) {
        const Index i = view.incomplete[r];
        if (work.labels.defined(i, m)) continue;
        const TaskPrediction& p = predictions[r][static_cast<std::size_t>(m)];
        candidates.push_back({i, m, p.value, p.confidence});
      }
      std::optional<double> threshold;
      if (auto it = config.min_confidence.find(ds.tasks[static_cast<std::size_t>(m)].name);
          it != config.min_confidence.end()) {
        threshold = it->second;
      }
      const auto chosen = select_top_k(std::move(candidates), config.select_per_task, threshold);
      TaskProgress& progress = record.tasks[static_cast<std::size_t>(m)];
      for (const Candidate& c : chosen) {
        const double model_value = ds.tasks[static_cast<std::size_t>(m)].is_classification()
                                       ? c.value
                                       : scaling.target_to_model(m, c.value);
        work.labels.set(c.instance, m, model_value);
        result.assignments.push_back({c.instance, m, c.value, c.confidence, iteration});
      }
      progress.filled = static_cast<Index>(chosen.size());
      if (!chosen.empty()) progress.boundary_confidence = chosen.back().confidence;
      progress.remaining = work.labels.undefined_count(m);
    }
    record.duration = std::chrono::steady_clock::now() - started;
    const bool stalled = std::all_of(record.tasks.begin(), record.tasks.end(),
                                     [](const TaskProgress& p) { return p.filled == 0; });
    result.iterations.push_back(std::move(record));
    if (!config.retrain_from_scratch) previous = std::move(net);
    if (stalled) {
      result.status = CdlcStatus::Stalled;
      result.warnings.push_back("iteration " + std::to_string(iteration) +
                                " assigned no labels; stopping (confidence thresholds too strict?)");
      break;
    }
  }
  return result;
}

MultiTargetDataset apply_assignments(const MultiTargetDataset& ds, const std::vector<PseudoLabelAssignment>& assignments) {
  MultiTargetDataset out = ds;
  for (const auto& a : assignments) {
    if (out.labels.defined(a.instance, a.task)) {
      throw std::logic_error("pseudo-label targets an already defined cell");
    }
    out.labels.set(a.instance, a.task, a.value);
  }
  return out;
}

}  // namespace xdata
