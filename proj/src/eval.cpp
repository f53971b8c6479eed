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

#include "xdata/eval.hpp"

#include <map>

#include "xdata/uncertainty.hpp"

namespace xdata {

const TaskMetric* MetricReport::find(const std::string& name) const {
  for (const auto& t : tasks) {
    if (t.task == name) return &t;
  }
  return nullptr;
}

MetricReport score(const std::vector<TaskSchema>& tasks, const LabelGrid& truth, const Eigen::MatrixXd& predicted) {
  MetricReport report;
  for (Index m = 0; m < static_cast<Index>(tasks.size()); ++m) {
    const auto& schema = tasks[static_cast<std::size_t>(m)];
    TaskMetric metric;
    metric.task = schema.name;
    metric.kind = schema.kind;
    for (Index i = 0; i < truth.rows(); ++i) {
      if (!truth.defined(i, m)) continue;
      metric.truth.push_back(truth.value(i, m));
      metric.predicted.push_back(predicted(i, m));
    }
    metric.evaluated = static_cast<Index>(metric.truth.size());
    if (metric.evaluated == 0) {
      metric.note = "not evaluable: no defined labels";
      report.warnings.push_back("task '" + schema.name + "' is not evaluable: no defined labels");
    } else {
      const Eigen::Map<const Eigen::VectorXd> t(metric.truth.data(), metric.evaluated);
      const Eigen::Map<const Eigen::VectorXd> p(metric.predicted.data(), metric.evaluated);
      if (schema.is_classification()) {
        metric.class_recall = class_recalls(t, p, schema.class_count());
        metric.uar = uar(t, p, schema.class_count());
      } else if (metric.evaluated < 2) {
        metric.note = "not evaluable: fewer than 2 defined labels";
        report.warnings.push_back("task '" + schema.name + "': correlation needs at least 2 labels");
      } else {
        metric.cc = pearson_cc(t, p);
        if (std::isnan(metric.cc)) {
          metric.note = "correlation undefined: zero variance";
          report.warnings.push_back("task '" + schema.name + "': correlation undefined (zero variance)");
        }
      }
    }
    report.tasks.push_back(std::move(metric));
  }
  return report;
}

MetricReport evaluate(const MtShlNetwork<double>& net, const MultiTargetDataset& eval_set,
                      const Standardizer* scaling) {
  if (eval_set.num_tasks() != net.num_tasks() || eval_set.num_features() != net.input_dim) {
    throw DataError("evaluation set does not match the network's tasks or features");
  }
  for (Index m = 0; m < net.num_tasks(); ++m) {
    if (eval_set.tasks[static_cast<std::size_t>(m)].kind != net.heads[static_cast<std::size_t>(m)].kind) {
      throw DataError("evaluation task '" + eval_set.tasks[static_cast<std::size_t>(m)].name +
                      "' does not match the network head kind");
    }
  }
  const auto preds = predict_deterministic(net, eval_set.features, scaling);
  Eigen::MatrixXd decoded(eval_set.size(), eval_set.num_tasks());
  for (Index i = 0; i < eval_set.size(); ++i) {
    for (Index m = 0; m < eval_set.num_tasks(); ++m) {
      decoded(i, m) = preds[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)].value;
    }
  }
  const LabelGrid truth = scaling ? scaling->inverse_labels(eval_set.labels, eval_set.tasks) : eval_set.labels;
  return score(eval_set.tasks, truth, decoded);
}

std::vector<PseudoLabelQuality> pseudo_label_accuracy(const std::vector<PseudoLabelAssignment>& assignments,
                                                      const LabelGrid& withheld_truth,
                                                      const std::vector<TaskSchema>& tasks) {
  std::vector<PseudoLabelQuality> out(tasks.size());
  std::vector<std::vector<double>> assigned(tasks.size());
  std::vector<std::vector<double>> truth(tasks.size());
  std::vector<std::map<int, std::pair<Index, Index>>> by_iteration(tasks.size());  // correct, total

  for (std::size_t m = 0; m < tasks.size(); ++m) {
    out[m].task = tasks[m].name;
    out[m].kind = tasks[m].kind;
  }
  for (const auto& a : assignments) {
    auto& q = out[static_cast<std::size_t>(a.task)];
    if (!withheld_truth.defined(a.instance, a.task)) {
      ++q.skipped;
      continue;
    }
    const double t = withheld_truth.value(a.instance, a.task);
    ++q.comparable;
    assigned[static_cast<std::size_t>(a.task)].push_back(a.value);
    truth[static_cast<std::size_t>(a.task)].push_back(t);
    auto& slot = by_iteration[static_cast<std::size_t>(a.task)][a.iteration];
    ++slot.second;
    if (tasks[static_cast<std::size_t>(a.task)].is_classification() && a.value == t) ++slot.first;
  }

  for (std::size_t m = 0; m < tasks.size(); ++m) {
    auto& q = out[m];
    if (q.comparable == 0) continue;
    const Eigen::Map<const Eigen::VectorXd> a(assigned[m].data(), q.comparable);
    const Eigen::Map<const Eigen::VectorXd> t(truth[m].data(), q.comparable);
    if (tasks[m].is_classification()) {
      q.accuracy = static_cast<double>((a.array() == t.array()).count()) / static_cast<double>(q.comparable);
    } else {
      q.mae = (a - t).cwiseAbs().mean();
      if (q.comparable >= 2) q.cc = pearson_cc(a, t);
    }
    for (const auto& [iteration, counts] : by_iteration[m]) {
      IterationAccuracy it;
      it.iteration = iteration;
      it.comparable = counts.second;
      if (tasks[m].is_classification()) {
        it.accuracy = static_cast<double>(counts.first) / static_cast<double>(counts.second);
      }
      q.per_iteration.push_back(it);
    }
  }
  return out;
}

}  // namespace xdata
