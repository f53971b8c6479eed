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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "xdata/uncertainty.hpp"

using namespace xdata;

TEST(Entropy, UniformAndOneHot) {
  EXPECT_NEAR(predictive_entropy(Eigen::Vector4d::Constant(0.25)), std::log(4.0), 1e-9);
  EXPECT_EQ(predictive_entropy(Eigen::Vector4d(0, 0, 1, 0)), 0.0);
  EXPECT_NEAR(classification_confidence(Eigen::Vector4d::Constant(0.25)), -std::log(4.0), 1e-9);
  EXPECT_EQ(classification_confidence(Eigen::Vector3d(1, 0, 0)), 0.0);
}

TEST(Confidence, RegressionSampleVariance) {
  EXPECT_EQ(regression_confidence(Eigen::Vector4d(1, 1, 1, 1)), 0.0);
  // mean 2.5, squared deviations 2.25 + 0.25 + 0.25 + 2.25 = 5, over n - 1 = 3
  EXPECT_NEAR(regression_confidence(Eigen::Vector4d(1, 2, 3, 4)), -5.0 / 3.0, 1e-15);
  EXPECT_EQ(regression_confidence(Eigen::VectorXd::Constant(1, 7.0)), 0.0);
}

TEST(Confidence, BoundsOverRandomInputs) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> k_dist(2, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = k_dist(rng);
    Eigen::VectorXd p(k);
    for (int j = 0; j < k; ++j) p(j) = u(rng) * u(rng);
    p /= p.sum();
    const double c = classification_confidence(p);
    EXPECT_LE(c, 0.0);
    EXPECT_GE(c, -std::log(static_cast<double>(k)));
    Eigen::VectorXd s(5);
    for (int j = 0; j < 5; ++j) s(j) = 10.0 * u(rng) - 5.0;
    EXPECT_LE(regression_confidence(s), 0.0);
  }
}

TEST(Decode, TieRules) {
  EXPECT_EQ(decode_class(TaskKind::Binary, Eigen::Vector2d(0.5, 0.5)).value, 0);
  EXPECT_EQ(decode_class(TaskKind::Binary, Eigen::Vector2d(0.4, 0.6)).value, 1);
  EXPECT_EQ(decode_class(TaskKind::Multiclass, Eigen::Vector3d(0.1, 0.6, 0.3)).value, 1);
  EXPECT_EQ(decode_class(TaskKind::Multiclass, Eigen::Vector3d(0.4, 0.2, 0.4)).value, 0);
  EXPECT_EQ(decode_class(TaskKind::Multiclass, Eigen::Vector4d(0.1, 0.3, 0.3, 0.3)).value, 1);
}

namespace {

MtShlNetwork<double> constant_network(double dropout) {
  NetworkConfig config;
  config.shared_layer_sizes = {4};
  config.dropout_rate = dropout;
  config.mc_passes = 8;
  auto net = init_network(config, 2, oracle::three_kind_tasks());
  return net;
}

}  // namespace

TEST(Predict, RegressionDecodesToTargetUnits) {
  auto net = constant_network(0.0);
  net.heads[2].output.weights.setZero();
  net.heads[2].output.bias(0) = 1.0;
  Standardizer scaling = Standardizer::identity(2, 3);
  scaling.target_mean(2) = 3.0;
  scaling.target_scale(2) = 2.0;
  Rng rng(1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 2);
  const auto preds = predict(net, x, rng, &scaling);
  ASSERT_EQ(preds.size(), 3u);
  for (const auto& row : preds) {
    EXPECT_DOUBLE_EQ(row[2].value, 5.0);
    EXPECT_DOUBLE_EQ(std::get<double>(row[2].label), 5.0);
    EXPECT_EQ(row[2].confidence, 0.0);
  }
}

TEST(Predict, ZeroDropoutGivesExactlyZeroVariance) {
  const auto net = constant_network(0.0);
  Rng rng(3);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 2);
  for (const auto& row : predict(net, x, rng)) EXPECT_EQ(row[2].confidence, 0.0);
  const Eigen::RowVectorXd one = x.row(0);
  EXPECT_EQ(confidence(net, one, 2, 5, rng), 0.0);
}

TEST(Predict, McMatchesManualPasses) {
  const auto net = constant_network(0.3);
  Standardizer scaling = Standardizer::identity(2, 3);
  scaling.target_mean(2) = -1.0;
  scaling.target_scale(2) = 3.0;
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 2);

  Rng rng(42);
  const auto preds = predict(net, x, rng, &scaling);

  Rng replay(42);
  std::vector<TaskOutputs<double>> passes;
  for (int p = 0; p < net.config.mc_passes; ++p) passes.push_back(forward(net, x, SampledDropout{&replay}));
  const auto t = static_cast<double>(passes.size());
  for (Index i = 0; i < x.rows(); ++i) {
    // Multiclass: mean distribution, its entropy and argmax.
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    for (const auto& pass : passes) mean += pass[1].row(i).transpose();
    mean /= t;
    double h = 0.0;
    for (int k = 0; k < 4; ++k) h -= mean(k) * std::log(mean(k));
    Index best;
    mean.maxCoeff(&best);
    const auto& cls = preds[static_cast<std::size_t>(i)][1];
    EXPECT_NEAR(cls.confidence, -h, 1e-12);
    EXPECT_EQ(std::get<ClassIndex>(cls.label).value, best);
    EXPECT_NEAR(cls.probabilities.sum(), 1.0, 1e-12);

    // Binary: (1 - p, p) with the mean p.
    double pbar = 0.0;
    for (const auto& pass : passes) pbar += pass[0](i, 0);
    pbar /= t;
    const auto& bin = preds[static_cast<std::size_t>(i)][0];
    EXPECT_NEAR(bin.probabilities(1), pbar, 1e-12);
    EXPECT_EQ(std::get<ClassIndex>(bin.label).value, pbar > 0.5 ? 1 : 0);

    // Regression: unbiased variance of the target-unit samples.
    double sum = 0.0, sq = 0.0;
    for (const auto& pass : passes) sum += 3.0 * pass[2](i, 0) - 1.0;
    const double mu = sum / t;
    for (const auto& pass : passes) sq += std::pow(3.0 * pass[2](i, 0) - 1.0 - mu, 2);
    const auto& reg = preds[static_cast<std::size_t>(i)][2];
    EXPECT_NEAR(reg.value, mu, 1e-12);
    EXPECT_NEAR(reg.confidence, -sq / (t - 1.0), 1e-12);
    EXPECT_LT(reg.confidence, 0.0);
  }
}

TEST(Predict, DeterministicModeIgnoresDropout) {
  const auto net = constant_network(0.5);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
  const auto a = predict_deterministic(net, x);
  const auto out = forward(net, x);
  for (Index i = 0; i < 4; ++i) {
    EXPECT_EQ(a[static_cast<std::size_t>(i)][2].value, out[2](i, 0));
    EXPECT_EQ(a[static_cast<std::size_t>(i)][2].confidence, 0.0);
  }
}
