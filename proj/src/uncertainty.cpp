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

#include "xdata/uncertainty.hpp"

#include <algorithm>
#include <cmath>

namespace xdata {

double predictive_entropy(const Eigen::Ref<const Eigen::VectorXd>& p) {
  double h = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    if (p(k) > 0.0) h -= p(k) * std::log(p(k));
  }
  return h;
}

double classification_confidence(const Eigen::Ref<const Eigen::VectorXd>& mean_probabilities) {
  const double max_entropy = std::log(static_cast<double>(mean_probabilities.size()));
  return std::clamp(-predictive_entropy(mean_probabilities), -max_entropy, 0.0);
}

double regression_confidence(const Eigen::Ref<const Eigen::VectorXd>& samples) {
  if (samples.size() < 2) return 0.0;
  const double mean = samples.mean();
  const double ss = (samples.array() - mean).square().sum();
  return -ss / static_cast<double>(samples.size() - 1);
}

ClassIndex decode_class(TaskKind kind, const Eigen::Ref<const Eigen::VectorXd>& probabilities) {
  if (kind == TaskKind::Binary) return ClassIndex{probabilities(1) > 0.5 ? 1 : 0};
  Index best = 0;
  for (Index k = 1; k < probabilities.size(); ++k) {
    if (probabilities(k) > probabilities(best)) best = k;
  }
  return ClassIndex{best};
}

namespace {

Eigen::VectorXd as_distribution(TaskKind kind, const Eigen::RowVectorXd& out) {
  if (kind == TaskKind::Binary) return Eigen::Vector2d(1.0 - out(0), out(0));
  return out.transpose();
}

double to_target_units(const Standardizer* scaling, Index m, double v) {
  return scaling ? scaling->target_from_model(m, v) : v;
}

// Averages `passes` sets of task outputs; keeps every regression sample.
std::vector<std::vector<TaskPrediction>> summarize(const MtShlNetwork<double>& net,
                                                   const std::vector<TaskOutputs<double>>& passes,
                                                   const Standardizer* scaling) {
  const Index rows = passes.front().front().rows();
  const Index tasks = net.num_tasks();
  const auto t = static_cast<double>(passes.size());
  std::vector<std::vector<TaskPrediction>> result(static_cast<std::size_t>(rows),
                                                  std::vector<TaskPrediction>(static_cast<std::size_t>(tasks)));
  for (Index m = 0; m < tasks; ++m) {
    const TaskKind kind = net.heads[static_cast<std::size_t>(m)].kind;
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(rows, passes.front()[m].cols());
    for (const auto& pass : passes) mean += pass[m];
    mean /= t;
    for (Index i = 0; i < rows; ++i) {
      TaskPrediction& pred = result[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
      pred.task = m;
      if (kind == TaskKind::Regression) {
        Eigen::VectorXd samples(static_cast<Index>(passes.size()));
        for (std::size_t p = 0; p < passes.size(); ++p) {
          samples(static_cast<Index>(p)) = to_target_units(scaling, m, passes[p][m](i, 0));
        }
        pred.value = samples.size() == 1 ? samples(0) : samples.mean();
        pred.label = pred.value;
        pred.confidence = regression_confidence(samples);
      } else {
        pred.probabilities = as_distribution(kind, mean.row(i));
        pred.label = decode_class(kind, pred.probabilities);
        pred.value = static_cast<double>(std::get<ClassIndex>(pred.label).value);
        pred.confidence = classification_confidence(pred.probabilities);
      }
    }
  }
  return result;
}

}  // namespace

std::vector<std::vector<TaskPrediction>> predict(const MtShlNetwork<double>& net, const Eigen::MatrixXd& x,
                                                 Rng& rng, const Standardizer* scaling) {
  if (x.rows() == 0) return {};
  std::vector<TaskOutputs<double>> passes;
  if (net.config.dropout_rate <= 0.0) {
    passes.push_back(forward(net, x));
  } else {
    for (int p = 0; p < net.config.mc_passes; ++p) passes.push_back(forward(net, x, SampledDropout{&rng}));
  }
  return summarize(net, passes, scaling);
}

std::vector<std::vector<TaskPrediction>> predict_deterministic(const MtShlNetwork<double>& net,
                                                               const Eigen::MatrixXd& x,
                                                               const Standardizer* scaling) {
  if (x.rows() == 0) return {};
  return summarize(net, {forward(net, x)}, scaling);
}

double confidence(const MtShlNetwork<double>& net, const Eigen::Ref<const Eigen::RowVectorXd>& x, Index task,
                  int passes, Rng& rng, const Standardizer* scaling) {
  MtShlNetwork<double> sampler = net;
  sampler.config.mc_passes = passes;
  const Eigen::MatrixXd row = x;
  return predict(sampler, row, rng, scaling).front()[static_cast<std::size_t>(task)].confidence;
}

}  // namespace xdata
