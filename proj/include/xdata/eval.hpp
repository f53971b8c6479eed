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

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "xdata/dataset.hpp"
#include "xdata/model.hpp"

namespace xdata {

/// Recall per class; NaN for classes that never occur in `truth`.
template <typename D1, typename D2>
Eigen::VectorXd class_recalls(const Eigen::DenseBase<D1>& truth, const Eigen::DenseBase<D2>& predicted,
                              Index classes) {
  if (truth.size() == 0) throw std::invalid_argument("recall of an empty label vector");
  if (truth.size() != predicted.size()) throw std::invalid_argument("truth and prediction lengths differ");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(classes);
  Eigen::VectorXd correct = Eigen::VectorXd::Zero(classes);
  for (Index i = 0; i < truth.size(); ++i) {
    const auto t = static_cast<Index>(truth(i));
    const auto p = static_cast<Index>(predicted(i));
    if (t < 0 || t >= classes || p < 0 || p >= classes) throw std::out_of_range("class index out of range");
    total(t) += 1.0;
    if (t == p) correct(t) += 1.0;
  }
  Eigen::VectorXd recall(classes);
  for (Index k = 0; k < classes; ++k) {
    recall(k) = total(k) > 0 ? correct(k) / total(k) : std::numeric_limits<double>::quiet_NaN();
  }
  return recall;
}

/// Unweighted average recall over the classes present in `truth`.
template <typename D1, typename D2>
double uar(const Eigen::DenseBase<D1>& truth, const Eigen::DenseBase<D2>& predicted, Index classes) {
  const Eigen::VectorXd recall = class_recalls(truth, predicted, classes);
  double sum = 0.0;
  Index present = 0;
  for (Index k = 0; k < classes; ++k) {
    if (!std::isnan(recall(k))) {
      sum += recall(k);
      ++present;
    }
  }
  return sum / static_cast<double>(present);
}

/// Sample Pearson correlation. NaN when either input has zero variance.
template <typename D1, typename D2>
double pearson_cc(const Eigen::DenseBase<D1>& x, const Eigen::DenseBase<D2>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation inputs differ in length");
  if (x.size() < 2) throw std::invalid_argument("correlation needs at least two samples");
  const Eigen::ArrayXd dx = x.derived().template cast<double>().array() - x.derived().template cast<double>().mean();
  const Eigen::ArrayXd dy = y.derived().template cast<double>().array() - y.derived().template cast<double>().mean();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (sxx <= 0.0 || syy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (dx * dy).sum() / std::sqrt(sxx * syy);
}

struct TaskMetric {
  std::string task;
  TaskKind kind = TaskKind::Regression;
  Index evaluated = 0;
  double uar = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd class_recall;
  double cc = std::numeric_limits<double>::quiet_NaN();
  std::string note;  // why a metric is missing, if it is
  std::vector<double> truth;      // target units
  std::vector<double> predicted;  // target units

  /// The headline number: UAR for classification, CC for regression.
  double score() const { return kind == TaskKind::Regression ? cc : uar; }
};

struct MetricReport {
  std::vector<TaskMetric> tasks;
  std::vector<std::string> warnings;

  const TaskMetric* find(const std::string& name) const;
};

/// Scores decoded predictions against the defined cells of `truth`
/// (both in target units). `predicted` is indexed [row][task] by value.
MetricReport score(const std::vector<TaskSchema>& tasks, const LabelGrid& truth, const Eigen::MatrixXd& predicted);

/// Deterministic-mode predictions on `eval_set` (already transformed with
/// `scaling`) scored in target units.
MetricReport evaluate(const MtShlNetwork<double>& net, const MultiTargetDataset& eval_set,
                      const Standardizer* scaling = nullptr);

struct IterationAccuracy {
  int iteration = 0;
  Index comparable = 0;
  double accuracy = std::numeric_limits<double>::quiet_NaN();
};

/// Agreement of pseudo-labels with the labels that were withheld before the run.
struct PseudoLabelQuality {
  std::string task;
  TaskKind kind = TaskKind::Regression;
  Index comparable = 0;
  Index skipped = 0;  // assigned cells without a withheld truth
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  std::vector<IterationAccuracy> per_iteration;
  double cc = std::numeric_limits<double>::quiet_NaN();
  double mae = std::numeric_limits<double>::quiet_NaN();
};

std::vector<PseudoLabelQuality> pseudo_label_accuracy(const std::vector<PseudoLabelAssignment>& assignments,
                                                      const LabelGrid& withheld_truth,
                                                      const std::vector<TaskSchema>& tasks);

}  // namespace xdata
