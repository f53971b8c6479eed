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
#include <sstream>

#include "oracles.hpp"
#include "xdata/checkpoint.hpp"
#include "xdata/model.hpp"

using namespace xdata;

namespace {

std::vector<TaskSchema> one_regression() { return {{"y", TaskKind::Regression, {}, {1}}}; }

}  // namespace

TEST(InitNetwork, DeterministicInSeed) {
  NetworkConfig config;
  config.seed = 17;
  const auto tasks = oracle::three_kind_tasks();
  const auto a = init_network(config, 5, tasks);
  const auto b = init_network(config, 5, tasks);
  EXPECT_EQ(get_parameters(a), get_parameters(b));
  config.seed = 18;
  EXPECT_NE(get_parameters(init_network(config, 5, tasks)), get_parameters(a));
}

TEST(InitNetwork, LayerShapesChain) {
  NetworkConfig config;
  config.shared_layer_sizes = {8, 8};
  const auto net = init_network(config, 10, one_regression());
  ASSERT_EQ(net.trunk.size(), 2u);
  EXPECT_EQ(net.trunk[0].weights.rows(), 10);
  EXPECT_EQ(net.trunk[0].weights.cols(), 8);
  EXPECT_EQ(net.trunk[1].weights.rows(), 8);
  EXPECT_EQ(net.trunk[1].weights.cols(), 8);
  EXPECT_TRUE(net.heads[0].hidden.empty());
  EXPECT_EQ(net.heads[0].output.weights.rows(), 8);
  EXPECT_EQ(net.heads[0].output.weights.cols(), 1);
  EXPECT_TRUE(net.trunk[0].bias.isZero(0));
  const double range = std::sqrt(6.0 / 18.0);
  EXPECT_LE(net.trunk[0].weights.cwiseAbs().maxCoeff(), range);
}

TEST(InitNetwork, HeadSizesAndErrors) {
  NetworkConfig config;
  config.shared_layer_sizes = {6};
  config.head_hidden_sizes["cls"] = {3};
  const auto net = init_network(config, 4, oracle::three_kind_tasks());
  EXPECT_EQ(net.heads[0].output_size(), 1);
  EXPECT_EQ(net.heads[1].hidden.size(), 1u);
  EXPECT_EQ(net.heads[1].output_size(), 4);
  EXPECT_EQ(net.heads[2].output_size(), 1);
  EXPECT_THROW(init_network(config, 4, {}), std::invalid_argument);
  config.dropout_rate = 1.0;
  EXPECT_THROW(init_network(config, 4, one_regression()), std::invalid_argument);
  config.dropout_rate = 0.5;
  config.mc_passes = 1;
  EXPECT_THROW(init_network(config, 4, one_regression()), std::invalid_argument);
}

TEST(Forward, ZeroDropoutSampledEqualsDeterministic) {
  NetworkConfig config;
  config.dropout_rate = 0.0;
  const auto net = init_network(config, 3, oracle::three_kind_tasks());
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(7, 3);
  Rng rng(5);
  const auto a = forward(net, x);
  const auto b = forward(net, x, SampledDropout{&rng});
  for (std::size_t m = 0; m < a.size(); ++m) EXPECT_EQ(a[m], b[m]);
}

TEST(Forward, DropoutChangesSamplesButNotDeterministicMode) {
  NetworkConfig config;
  config.dropout_rate = 0.5;
  const auto net = init_network(config, 3, one_regression());
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 3);
  Rng rng(5);
  EXPECT_NE(forward(net, x, SampledDropout{&rng})[0], forward(net, x, SampledDropout{&rng})[0]);
  EXPECT_EQ(forward(net, x)[0], forward(net, x)[0]);
}

TEST(Forward, SoftmaxOfZeroHeadIsUniform) {
  NetworkConfig config;
  auto net = init_network(config, 3, oracle::three_kind_tasks());
  net.heads[1].output.weights.setZero();
  net.heads[1].output.bias.setZero();
  const auto out = forward_one(net, Eigen::Vector3d(0.3, -1.0, 2.0));
  for (Index k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(out[1](k), 0.25);
  EXPECT_GT(out[0](0), 0.0);
  EXPECT_LT(out[0](0), 1.0);
}

TEST(Forward, DimensionMismatchThrows) {
  const auto net = init_network(NetworkConfig{}, 3, one_regression());
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 4);
  EXPECT_THROW(forward(net, x), std::invalid_argument);
}

TEST(Forward, OutputsAreProbabilitiesForLargeLogits) {
  Eigen::MatrixXd z(3, 4);
  z << 1000, -1000, 0, 999, -1000, -1000, -1000, -1000, 1e3, 1e3, 1e3, -1e3;
  const Eigen::MatrixXd p = softmax_rows(z);
  EXPECT_TRUE(p.allFinite());
  EXPECT_GE(p.minCoeff(), 0.0);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-9);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_GE(sigmoid(-1000.0), 0.0);
  EXPECT_TRUE(std::isfinite(sigmoid(-1000.0)));
}

TEST(MtLoss, WorkedExamples) {
  LabelGrid labels(1, 1);
  labels.set(0, 0, 1.0);
  TaskOutputs<double> reg{Eigen::MatrixXd::Constant(1, 1, 0.5)};
  EXPECT_DOUBLE_EQ(mt_loss(reg, labels, {TaskKind::Regression}), 0.25);

  labels.set(0, 0, 0.0);
  Eigen::MatrixXd p(1, 3);
  p << 0.7, 0.2, 0.1;
  EXPECT_NEAR(mt_loss(TaskOutputs<double>{p}, labels, {TaskKind::Multiclass}), 0.356675, 1e-6);

  labels.set(0, 0, 1.0);
  TaskOutputs<double> bin{Eigen::MatrixXd::Constant(1, 1, 0.8)};
  EXPECT_NEAR(mt_loss(bin, labels, {TaskKind::Binary}), -std::log(0.8), 1e-15);
  labels.set(0, 0, 0.0);
  EXPECT_NEAR(mt_loss(bin, labels, {TaskKind::Binary}), -std::log(0.2), 1e-15);
}

TEST(MtLoss, AllUndefinedGivesZeroLossAndGradient) {
  std::mt19937_64 rng(3);
  auto p = oracle::random_micro_problem(rng);
  const LabelGrid empty(p.labels.rows(), p.labels.tasks());
  const auto lg = loss_and_gradient(p.net, p.x, empty);
  EXPECT_EQ(lg.loss, 0.0);
  EXPECT_TRUE(get_parameters(lg.gradient).isZero(0));
  EXPECT_EQ(mt_loss(forward(p.net, p.x), empty, task_kinds(p.net)), 0.0);
}

TEST(MtLoss, UndefinedCellPayloadIsIgnored) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = oracle::random_micro_problem(rng);
    const auto before = loss_and_gradient(p.net, p.x, p.labels);
    LabelGrid perturbed = p.labels;
    for (Index i = 0; i < perturbed.rows(); ++i) {
      for (Index m = 0; m < perturbed.tasks(); ++m) {
        if (!perturbed.defined(i, m)) perturbed.raw_values()(i, m) = 1e6 * (i + 1) - m;
      }
    }
    const auto after = loss_and_gradient(p.net, p.x, perturbed);
    EXPECT_EQ(before.loss, after.loss);
    EXPECT_EQ(get_parameters(before.gradient), get_parameters(after.gradient));
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = oracle::random_micro_problem(rng);
    const auto lg = loss_and_gradient(p.net, p.x, p.labels);
    const Eigen::VectorXd numeric = oracle::numeric_gradient(p.net, p.x, p.labels);
    EXPECT_LE(oracle::gradient_violation(get_parameters(lg.gradient), numeric, 1e-4, 1e-8), 0.0) << "trial " << trial;
    EXPECT_NEAR(lg.loss, mt_loss(forward(p.net, p.x), p.labels, task_kinds(p.net)), 1e-10);
  }
}

TEST(Gradient, ReluNetworkMatchesAwayFromKinks) {
  std::mt19937_64 rng(1234);
  auto p = oracle::random_micro_problem(rng);
  p.net.config.hidden_activation = Activation::Relu;
  const auto lg = loss_and_gradient(p.net, p.x, p.labels);
  const Eigen::VectorXd numeric = oracle::numeric_gradient(p.net, p.x, p.labels);
  EXPECT_LE(oracle::gradient_violation(get_parameters(lg.gradient), numeric, 1e-4, 1e-7), 0.0);
}

TEST(Gradient, SampledDropoutUsesTheSameMask) {
  // With a fixed RNG state the sampled network is a fixed function, so its
  // gradient must match finite differences replayed with the same stream.
  std::mt19937_64 rng(8);
  auto p = oracle::random_micro_problem(rng);
  p.net.config.dropout_rate = 0.3;
  Rng r1(77);
  const auto lg = loss_and_gradient(p.net, p.x, p.labels, SampledDropout{&r1});
  const Eigen::VectorXd theta = get_parameters(p.net);
  Eigen::VectorXd numeric(theta.size());
  auto probe = p.net;
  for (Index k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd t = theta;
    t(k) += 1e-5;
    set_parameters(probe, t);
    Rng up_rng(77);
    const double up = mt_loss(forward(probe, p.x, SampledDropout{&up_rng}), p.labels, task_kinds(probe));
    t(k) -= 2e-5;
    set_parameters(probe, t);
    Rng down_rng(77);
    const double down = mt_loss(forward(probe, p.x, SampledDropout{&down_rng}), p.labels, task_kinds(probe));
    numeric(k) = (up - down) / 2e-5;
  }
  EXPECT_LE(oracle::gradient_violation(get_parameters(lg.gradient), numeric, 1e-4, 1e-8), 0.0);
}

TEST(Gradient, FloatInstantiationCompiles) {
  NetworkConfig config;
  config.dropout_rate = 0.0;
  const auto net = init_network<float>(config, 3, oracle::three_kind_tasks());
  LabelGrid labels(2, 3);
  labels.set(0, 0, 1);
  labels.set(1, 1, 2);
  labels.set(1, 2, 0.5);
  const auto lg = loss_and_gradient(net, MatrixX<float>::Random(2, 3).eval(), labels);
  EXPECT_TRUE(std::isfinite(lg.loss));
  EXPECT_GT(lg.loss, 0.0f);
}

namespace {

struct ToyProblem {
  Eigen::MatrixXd x;
  LabelGrid labels;
  std::vector<TaskSchema> tasks;
};

// 200 points, class = [x0 + x1 > 0]; second task left without labels.
ToyProblem separable_toy() {
  Rng rng(31);
  ToyProblem t;
  t.x.resize(200, 2);
  t.labels = LabelGrid(200, 2);
  for (Index i = 0; i < 200; ++i) {
    t.x(i, 0) = 2.0 * uniform01(rng) - 1.0;
    t.x(i, 1) = 2.0 * uniform01(rng) - 1.0;
    t.labels.set(i, 0, t.x(i, 0) + t.x(i, 1) > 0 ? 1.0 : 0.0);
  }
  t.tasks = {{"sep", TaskKind::Binary, {"neg", "pos"}, {1}}, {"unused", TaskKind::Regression, {}, {1}}};
  return t;
}

}  // namespace

TEST(Train, LossDecreasesOnSeparableToy) {
  const auto toy = separable_toy();
  NetworkConfig config;
  config.shared_layer_sizes = {8};
  config.epochs = 50;
  config.learning_rate = 0.01;
  config.dropout_rate = 0.1;
  auto net = init_network(config, 2, toy.tasks);
  const auto kinds = task_kinds(net);
  const double initial = mt_loss(forward(net, toy.x), toy.labels, kinds);
  Rng rng(1);
  TrainReport report;
  const auto trained = train(net, toy.x, toy.labels, rng, &report);
  const double final_loss = mt_loss(forward(trained, toy.x), toy.labels, kinds);
  EXPECT_LT(final_loss, initial);
  EXPECT_LT(final_loss, 0.5 * initial);
  EXPECT_EQ(report.epoch_loss.size(), 50u);

  // Task without labels: head untouched, warning recorded.
  EXPECT_TRUE(report.frozen_heads[1]);
  EXPECT_FALSE(report.frozen_heads[0]);
  EXPECT_EQ(trained.heads[1].output.weights, net.heads[1].output.weights);
  EXPECT_EQ(trained.heads[1].output.bias, net.heads[1].output.bias);
  EXPECT_FALSE(report.warnings.empty());
}

TEST(Train, DeterministicGivenSeedAndData) {
  const auto toy = separable_toy();
  NetworkConfig config;
  config.epochs = 5;
  config.momentum = 0.5;
  const auto net = init_network(config, 2, toy.tasks);
  Rng r1(9), r2(9);
  const auto a = train(net, toy.x, toy.labels, r1);
  const auto b = train(net, toy.x, toy.labels, r2);
  EXPECT_EQ(get_parameters(a), get_parameters(b));
}

TEST(Train, EmptyLabeledSetThrows) {
  const auto net = init_network(NetworkConfig{}, 2, one_regression());
  Rng rng(1);
  EXPECT_THROW(train(net, Eigen::MatrixXd(0, 2), LabelGrid(0, 1), rng), std::invalid_argument);
}

TEST(Checkpoint, RoundTripsParametersExactly) {
  NetworkConfig config;
  config.head_hidden_sizes["cls"] = {3};
  const auto net = init_network(config, 4, oracle::three_kind_tasks());
  std::stringstream buf;
  save_checkpoint(buf, net);
  const auto back = load_checkpoint(buf);
  EXPECT_EQ(get_parameters(back), get_parameters(net));
  EXPECT_EQ(back.heads[1].kind, TaskKind::Multiclass);
  EXPECT_EQ(back.config.dropout_rate, net.config.dropout_rate);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 4);
  EXPECT_EQ(forward(back, x)[1], forward(net, x)[1]);

  std::stringstream bad("xdata-mtshl 99\n");
  EXPECT_THROW(load_checkpoint(bad), std::runtime_error);
}
