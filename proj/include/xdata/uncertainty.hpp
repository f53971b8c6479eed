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
#include <vector>

#include "xdata/dataset.hpp"
#include "xdata/model.hpp"

namespace xdata {

/// Decoded prediction for one (instance, task) cell.
struct TaskPrediction {
  Index task = 0;
  LabelCell label;
  Eigen::VectorXd probabilities;  // classification: one entry per class, binary as (1-p, p)
  double value = 0.0;             // regression: mean output in target units
  double confidence = 0.0;        // higher is more certain; never above 0
};

/// Shannon entropy in nats, with 0 ln 0 = 0.
double predictive_entropy(const Eigen::Ref<const Eigen::VectorXd>& p);

/// Negative entropy of the averaged distribution, within [-ln K, 0].
double classification_confidence(const Eigen::Ref<const Eigen::VectorXd>& mean_probabilities);

/// Negative unbiased sample variance of the sampled outputs (0 for a single sample).
double regression_confidence(const Eigen::Ref<const Eigen::VectorXd>& samples);

/// Argmax with ties to the lower class; binary picks class 1 only above 0.5.
ClassIndex decode_class(TaskKind kind, const Eigen::Ref<const Eigen::VectorXd>& probabilities);

/// Monte-Carlo dropout prediction: `net.config.mc_passes` sampled passes
/// over `x`, decoded and scored per task. With dropout disabled a single
/// deterministic pass stands in for all of them. Regression values and
/// variances are reported in target units via `scaling` when given.
/// Result is indexed [row][task].
std::vector<std::vector<TaskPrediction>> predict(const MtShlNetwork<double>& net, const Eigen::MatrixXd& x,
                                                 Rng& rng, const Standardizer* scaling = nullptr);

/// Deterministic-mode decoding, as used for evaluation. Indexed [row][task].
std::vector<std::vector<TaskPrediction>> predict_deterministic(const MtShlNetwork<double>& net,
                                                               const Eigen::MatrixXd& x,
                                                               const Standardizer* scaling = nullptr);

/// Confidence of a single instance for one task using `passes` sampled passes.
double confidence(const MtShlNetwork<double>& net, const Eigen::Ref<const Eigen::RowVectorXd>& x, Index task,
                  int passes, Rng& rng, const Standardizer* scaling = nullptr);

}  // namespace xdata
