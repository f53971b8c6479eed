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

// Multi-task shared-hidden-layer network: a dense trunk shared by all tasks
// and one head per task (optional hidden layers plus an output layer).
// Batches are row-major in the sense that each row of an input matrix is one
// instance; layer weights are stored fan_in x fan_out.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "xdata/dataset.hpp"
#include "xdata/random.hpp"

namespace xdata {

enum class Activation { Tanh, Relu };

struct NetworkConfig {
  std::vector<Index> shared_layer_sizes{32, 32};
  std::map<std::string, std::vector<Index>> head_hidden_sizes;  // by task name
  double dropout_rate = 0.2;
  Activation hidden_activation = Activation::Tanh;
  int epochs = 40;
  double learning_rate = 0.002;  // applied to the summed (not averaged) batch loss
  double momentum = 0.0;
  Index batch_size = 32;
  int mc_passes = 20;
  std::uint64_t seed = 1;

  void validate() const {
    for (Index s : shared_layer_sizes) {
      if (s < 1) throw std::invalid_argument("shared layer sizes must be positive");
    }
    for (const auto& [task, sizes] : head_hidden_sizes) {
      for (Index s : sizes) {
        if (s < 1) throw std::invalid_argument("head layer sizes for '" + task + "' must be positive");
      }
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
      throw std::invalid_argument("dropout rate must lie in [0, 1)");
    }
    if (epochs < 1) throw std::invalid_argument("epochs must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
    if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
    if (mc_passes < 1) throw std::invalid_argument("mc_passes must be positive");
    if (dropout_rate > 0.0 && mc_passes < 2) {
      throw std::invalid_argument("mc_passes must be at least 2 when dropout is enabled");
    }
  }
};

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar>
struct DenseLayer {
  MatrixX<Scalar> weights;  // fan_in x fan_out
  RowVectorX<Scalar> bias;

  Index fan_in() const { return weights.rows(); }
  Index fan_out() const { return weights.cols(); }

  static DenseLayer zeros(Index in, Index out) {
    return {MatrixX<Scalar>::Zero(in, out), RowVectorX<Scalar>::Zero(out)};
  }
};

template <typename Scalar>
struct TaskHead {
  TaskKind kind = TaskKind::Regression;
  std::vector<DenseLayer<Scalar>> hidden;
  DenseLayer<Scalar> output;

  Index output_size() const { return output.fan_out(); }
};

template <typename Scalar = double>
struct MtShlNetwork {
  Index input_dim = 0;
  std::vector<DenseLayer<Scalar>> trunk;
  std::vector<TaskHead<Scalar>> heads;
  NetworkConfig config;

  Index num_tasks() const { return static_cast<Index>(heads.size()); }
  Index trunk_output_dim() const { return trunk.empty() ? input_dim : trunk.back().fan_out(); }
};

/// Gradients share the parameter layout of the network itself.
template <typename Scalar>
using NetworkGradient = MtShlNetwork<Scalar>;

inline Index output_size(const TaskSchema& task) {
  return task.kind == TaskKind::Multiclass ? task.class_count() : 1;
}

/// Visits every layer in a fixed order: trunk, then per head its hidden
/// layers followed by its output layer.
template <typename Net, typename F>
void visit_layers(Net& net, F&& f) {
  for (auto& layer : net.trunk) f(layer);
  for (auto& head : net.heads) {
    for (auto& layer : head.hidden) f(layer);
    f(head.output);
  }
}

template <typename NetA, typename NetB, typename F>
void visit_layers(NetA& a, NetB& b, F&& f) {
  for (std::size_t l = 0; l < a.trunk.size(); ++l) f(a.trunk[l], b.trunk[l]);
  for (std::size_t m = 0; m < a.heads.size(); ++m) {
    for (std::size_t l = 0; l < a.heads[m].hidden.size(); ++l) f(a.heads[m].hidden[l], b.heads[m].hidden[l]);
    f(a.heads[m].output, b.heads[m].output);
  }
}

template <typename Scalar>
NetworkGradient<Scalar> zeros_like(const MtShlNetwork<Scalar>& net) {
  NetworkGradient<Scalar> g = net;
  visit_layers(g, [](DenseLayer<Scalar>& layer) {
    layer.weights.setZero();
    layer.bias.setZero();
  });
  return g;
}

template <typename Scalar>
Index parameter_count(const MtShlNetwork<Scalar>& net) {
  Index n = 0;
  visit_layers(net, [&](const DenseLayer<Scalar>& layer) { n += layer.weights.size() + layer.bias.size(); });
  return n;
}

/// All parameters as one vector (weights column-major, then bias, per layer).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> get_parameters(const MtShlNetwork<Scalar>& net) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> theta(parameter_count(net));
  Index k = 0;
  visit_layers(net, [&](const DenseLayer<Scalar>& layer) {
    theta.segment(k, layer.weights.size()) = layer.weights.reshaped();
    k += layer.weights.size();
    theta.segment(k, layer.bias.size()) = layer.bias.transpose();
    k += layer.bias.size();
  });
  return theta;
}

template <typename Scalar, typename Derived>
void set_parameters(MtShlNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& theta) {
  if (theta.size() != parameter_count(net)) throw std::invalid_argument("parameter vector has wrong size");
  Index k = 0;
  visit_layers(net, [&](DenseLayer<Scalar>& layer) {
    layer.weights.reshaped() = theta.segment(k, layer.weights.size());
    k += layer.weights.size();
    layer.bias = theta.segment(k, layer.bias.size()).transpose();
    k += layer.bias.size();
  });
}

namespace detail {

template <typename Scalar>
DenseLayer<Scalar> glorot_layer(Index in, Index out, Rng& rng) {
  const double range = std::sqrt(6.0 / static_cast<double>(in + out));
  DenseLayer<Scalar> layer = DenseLayer<Scalar>::zeros(in, out);
  for (Index c = 0; c < out; ++c) {
    for (Index r = 0; r < in; ++r) {
      layer.weights(r, c) = static_cast<Scalar>((2.0 * uniform01(rng) - 1.0) * range);
    }
  }
  return layer;
}

}  // namespace detail

/// Uniform fan-in/fan-out scaled weights, zero biases; deterministic in config.seed.
template <typename Scalar = double>
MtShlNetwork<Scalar> init_network(const NetworkConfig& config, Index feature_dim,
                                  const std::vector<TaskSchema>& tasks) {
  config.validate();
  if (tasks.empty()) throw std::invalid_argument("network needs at least one task");
  if (feature_dim < 1) throw std::invalid_argument("network needs at least one input feature");

  MtShlNetwork<Scalar> net;
  net.input_dim = feature_dim;
  net.config = config;
  Rng rng(config.seed);

  Index width = feature_dim;
  for (Index size : config.shared_layer_sizes) {
    net.trunk.push_back(detail::glorot_layer<Scalar>(width, size, rng));
    width = size;
  }
  for (const auto& task : tasks) {
    TaskHead<Scalar> head;
    head.kind = task.kind;
    if (task.is_classification() && task.class_count() < 2) {
      throw std::invalid_argument("classification task '" + task.name + "' needs at least 2 classes");
    }
    Index w = width;
    if (auto it = config.head_hidden_sizes.find(task.name); it != config.head_hidden_sizes.end()) {
      for (Index size : it->second) {
        head.hidden.push_back(detail::glorot_layer<Scalar>(w, size, rng));
        w = size;
      }
    }
    head.output = detail::glorot_layer<Scalar>(w, output_size(task), rng);
    net.heads.push_back(std::move(head));
  }
  return net;
}

// ---------------------------------------------------------------------------
// Forward pass

struct Deterministic {};
/// Inverted dropout on every hidden unit, drawing masks from `rng`.
struct SampledDropout {
  Rng* rng;
};
using PassMode = std::variant<Deterministic, SampledDropout>;

/// Per-task outputs of a batch: B x 1 for binary (sigmoid) and regression
/// (linear), B x K for multiclass (softmax).
template <typename Scalar>
using TaskOutputs = std::vector<MatrixX<Scalar>>;

template <typename Scalar>
struct HiddenTrace {
  MatrixX<Scalar> input;
  MatrixX<Scalar> activation;  // before masking
  MatrixX<Scalar> mask;        // empty when no dropout was applied
};

template <typename Scalar>
struct ForwardTrace {
  std::vector<HiddenTrace<Scalar>> trunk;
  std::vector<std::vector<HiddenTrace<Scalar>>> head_hidden;
  std::vector<MatrixX<Scalar>> head_input;
  std::vector<MatrixX<Scalar>> logits;
};

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

/// Row-wise softmax with max subtraction.
template <typename Derived>
MatrixX<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> p = (z.colwise() - z.rowwise().maxCoeff()).array().exp().matrix();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

namespace detail {

template <typename Scalar>
void activate(Activation act, MatrixX<Scalar>& z) {
  if (act == Activation::Tanh) {
    z = z.array().tanh().matrix();
  } else {
    z = z.cwiseMax(Scalar(0));
  }
}

template <typename Scalar>
MatrixX<Scalar> affine(const MatrixX<Scalar>& a, const DenseLayer<Scalar>& layer) {
  return (a * layer.weights).rowwise() + layer.bias;
}

template <typename Scalar>
MatrixX<Scalar> hidden_step(const MatrixX<Scalar>& a, const DenseLayer<Scalar>& layer,
                            const NetworkConfig& config, const PassMode& mode,
                            HiddenTrace<Scalar>* trace) {
  MatrixX<Scalar> h = affine(a, layer);
  activate(config.hidden_activation, h);
  MatrixX<Scalar> mask;
  if (const auto* dropout = std::get_if<SampledDropout>(&mode); dropout && config.dropout_rate > 0.0) {
    const double p = config.dropout_rate;
    const Scalar keep_scale = static_cast<Scalar>(1.0 / (1.0 - p));
    mask.resize(h.rows(), h.cols());
    for (Index i = 0; i < h.rows(); ++i) {
      for (Index j = 0; j < h.cols(); ++j) {
        mask(i, j) = uniform01(*dropout->rng) < p ? Scalar(0) : keep_scale;
      }
    }
  }
  if (trace) {
    trace->input = a;
    trace->activation = h;
    trace->mask = mask;
  }
  if (mask.size() > 0) h = h.cwiseProduct(mask);
  return h;
}

template <typename Scalar>
MatrixX<Scalar> output_activation(TaskKind kind, const MatrixX<Scalar>& logits) {
  switch (kind) {
    case TaskKind::Binary: return logits.unaryExpr([](Scalar z) { return sigmoid(z); });
    case TaskKind::Multiclass: return softmax_rows(logits);
    case TaskKind::Regression: return logits;
  }
  return logits;
}

}  // namespace detail

template <typename Scalar>
TaskOutputs<Scalar> forward(const MtShlNetwork<Scalar>& net, const MatrixX<Scalar>& x,
                            const PassMode& mode = Deterministic{}, ForwardTrace<Scalar>* trace = nullptr) {
  if (x.cols() != net.input_dim) {
    throw std::invalid_argument("input has " + std::to_string(x.cols()) + " features, network expects " +
                                std::to_string(net.input_dim));
  }
  if (trace) {
    trace->trunk.assign(net.trunk.size(), {});
    trace->head_hidden.assign(net.heads.size(), {});
    trace->head_input.assign(net.heads.size(), {});
    trace->logits.assign(net.heads.size(), {});
  }
  MatrixX<Scalar> a = x;
  for (std::size_t l = 0; l < net.trunk.size(); ++l) {
    a = detail::hidden_step(a, net.trunk[l], net.config, mode, trace ? &trace->trunk[l] : nullptr);
  }
  TaskOutputs<Scalar> outputs;
  outputs.reserve(net.heads.size());
  for (std::size_t m = 0; m < net.heads.size(); ++m) {
    const auto& head = net.heads[m];
    MatrixX<Scalar> h = a;
    if (trace) trace->head_hidden[m].assign(head.hidden.size(), {});
    for (std::size_t l = 0; l < head.hidden.size(); ++l) {
      h = detail::hidden_step(h, head.hidden[l], net.config, mode, trace ? &trace->head_hidden[m][l] : nullptr);
    }
    MatrixX<Scalar> logits = detail::affine(h, head.output);
    outputs.push_back(detail::output_activation(head.kind, logits));
    if (trace) {
      trace->head_input[m] = std::move(h);
      trace->logits[m] = std::move(logits);
    }
  }
  return outputs;
}

/// Single instance, deterministic.
template <typename Scalar, typename Derived>
std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> forward_one(const MtShlNetwork<Scalar>& net,
                                                                  const Eigen::MatrixBase<Derived>& x,
                                                                  const PassMode& mode = Deterministic{}) {
  MatrixX<Scalar> row = x.transpose().template cast<Scalar>();
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> out;
  for (auto& o : forward(net, row, mode)) out.push_back(o.row(0).transpose());
  return out;
}

// ---------------------------------------------------------------------------
// Masked multi-task loss

/// Loss of one defined cell given the task's output row.
template <typename Scalar, typename Derived>
Scalar cell_loss(TaskKind kind, const Eigen::MatrixBase<Derived>& output, double label) {
  using std::log;
  switch (kind) {
    case TaskKind::Binary: {
      const Scalar p = output(0);
      return label > 0.5 ? -log(p) : -log(Scalar(1) - p);
    }
    case TaskKind::Multiclass: return -log(output(static_cast<Index>(label)));
    case TaskKind::Regression: {
      const Scalar r = output(0) - static_cast<Scalar>(label);
      return r * r;
    }
  }
  return Scalar(0);
}

template <typename Scalar>
std::vector<TaskKind> task_kinds(const MtShlNetwork<Scalar>& net) {
  std::vector<TaskKind> kinds;
  for (const auto& h : net.heads) kinds.push_back(h.kind);
  return kinds;
}

/// Sum over defined cells of the task loss: cross-entropy for classification,
/// squared error for regression. Undefined cells are never read.
template <typename Scalar>
Scalar mt_loss(const TaskOutputs<Scalar>& outputs, const LabelGrid& labels, const std::vector<TaskKind>& kinds) {
  Scalar total(0);
  for (Index m = 0; m < labels.tasks(); ++m) {
    for (Index i = 0; i < labels.rows(); ++i) {
      if (labels.defined(i, m)) total += cell_loss<Scalar>(kinds[m], outputs[m].row(i), labels.value(i, m));
    }
  }
  return total;
}

template <typename Scalar>
struct LossGradient {
  Scalar loss;
  NetworkGradient<Scalar> gradient;
};

namespace detail {

// Loss and d(loss)/d(logits) for one head, computed from logits for stability.
template <typename Scalar>
Scalar head_loss_grad(TaskKind kind, const MatrixX<Scalar>& logits, const MatrixX<Scalar>& outputs,
                      const LabelGrid& labels, Index m, MatrixX<Scalar>& dlogits) {
  using std::exp;
  using std::log;
  using std::log1p;
  dlogits = MatrixX<Scalar>::Zero(logits.rows(), logits.cols());
  Scalar loss(0);
  for (Index i = 0; i < logits.rows(); ++i) {
    if (!labels.defined(i, m)) continue;
    const double y = labels.value(i, m);
    switch (kind) {
      case TaskKind::Binary: {
        const Scalar z = logits(i, 0);
        const Scalar t = static_cast<Scalar>(y > 0.5 ? 1.0 : 0.0);
        using std::abs;
        using std::max;
        loss += max(z, Scalar(0)) - t * z + log1p(exp(-abs(z)));
        dlogits(i, 0) = outputs(i, 0) - t;
        break;
      }
      case TaskKind::Multiclass: {
        const auto k = static_cast<Index>(y);
        const Scalar zmax = logits.row(i).maxCoeff();
        const Scalar lse = zmax + log((logits.row(i).array() - zmax).exp().sum());
        loss += lse - logits(i, k);
        dlogits.row(i) = outputs.row(i);
        dlogits(i, k) -= Scalar(1);
        break;
      }
      case TaskKind::Regression: {
        const Scalar r = logits(i, 0) - static_cast<Scalar>(y);
        loss += r * r;
        dlogits(i, 0) = Scalar(2) * r;
        break;
      }
    }
  }
  return loss;
}

// Backpropagates through one hidden layer; returns d(loss)/d(layer input).
template <typename Scalar>
MatrixX<Scalar> hidden_backward(const DenseLayer<Scalar>& layer, const HiddenTrace<Scalar>& trace,
                                Activation act, MatrixX<Scalar> dout, DenseLayer<Scalar>& grad) {
  if (trace.mask.size() > 0) dout = dout.cwiseProduct(trace.mask);
  if (act == Activation::Tanh) {
    dout.array() *= Scalar(1) - trace.activation.array().square();
  } else {
    dout.array() *= (trace.activation.array() > Scalar(0)).template cast<Scalar>();
  }
  grad.weights.noalias() += trace.input.transpose() * dout;
  grad.bias += dout.colwise().sum();
  return dout * layer.weights.transpose();
}

}  // namespace detail

/// Masked multi-task loss and its gradient for every parameter, by backpropagation.
template <typename Scalar>
LossGradient<Scalar> loss_and_gradient(const MtShlNetwork<Scalar>& net, const MatrixX<Scalar>& x,
                                       const LabelGrid& labels, const PassMode& mode = Deterministic{}) {
  if (labels.rows() != x.rows() || labels.tasks() != net.num_tasks()) {
    throw std::invalid_argument("label grid does not match the batch");
  }
  ForwardTrace<Scalar> trace;
  const TaskOutputs<Scalar> outputs = forward(net, x, mode, &trace);
  LossGradient<Scalar> result{Scalar(0), zeros_like(net)};
  const Activation act = net.config.hidden_activation;

  MatrixX<Scalar> dtrunk = MatrixX<Scalar>::Zero(x.rows(), net.trunk_output_dim());
  for (std::size_t m = 0; m < net.heads.size(); ++m) {
    const auto& head = net.heads[m];
    auto& ghead = result.gradient.heads[m];
    MatrixX<Scalar> dz;
    result.loss += detail::head_loss_grad(head.kind, trace.logits[m], outputs[m], labels, static_cast<Index>(m), dz);
    ghead.output.weights.noalias() += trace.head_input[m].transpose() * dz;
    ghead.output.bias += dz.colwise().sum();
    MatrixX<Scalar> dh = dz * head.output.weights.transpose();
    for (std::size_t l = head.hidden.size(); l-- > 0;) {
      dh = detail::hidden_backward(head.hidden[l], trace.head_hidden[m][l], act, std::move(dh), ghead.hidden[l]);
    }
    dtrunk += dh;
  }
  for (std::size_t l = net.trunk.size(); l-- > 0;) {
    dtrunk = detail::hidden_backward(net.trunk[l], trace.trunk[l], act, std::move(dtrunk), result.gradient.trunk[l]);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Training

struct TrainReport {
  std::vector<double> epoch_loss;   // summed sampled-dropout batch losses
  std::vector<bool> frozen_heads;   // heads without any defined cell
  std::vector<std::string> warnings;
};

/// Minibatch SGD (optional momentum) on the masked loss. `x` and `labels`
/// hold the labeled instances only. Deterministic in (rng state, data).
template <typename Scalar>
MtShlNetwork<Scalar> train(MtShlNetwork<Scalar> net, const MatrixX<Scalar>& x, const LabelGrid& labels, Rng& rng,
                           TrainReport* report = nullptr) {
  if (x.rows() == 0) throw std::invalid_argument("cannot train on an empty labeled set");
  if (labels.rows() != x.rows() || labels.tasks() != net.num_tasks()) {
    throw std::invalid_argument("label grid does not match the training features");
  }
  const NetworkConfig& config = net.config;
  TrainReport local;
  TrainReport& rep = report ? *report : local;
  rep = TrainReport{};
  rep.frozen_heads.assign(net.heads.size(), false);
  for (Index m = 0; m < net.num_tasks(); ++m) {
    if (labels.defined_count(m) == 0) {
      rep.frozen_heads[static_cast<std::size_t>(m)] = true;
      rep.warnings.push_back("task " + std::to_string(m) + " has no labeled instances; head frozen this round");
    }
  }

  NetworkGradient<Scalar> velocity = zeros_like(net);
  const Scalar lr = static_cast<Scalar>(config.learning_rate);
  const Scalar mu = static_cast<Scalar>(config.momentum);
  PassMode mode = config.dropout_rate > 0.0 ? PassMode{SampledDropout{&rng}} : PassMode{Deterministic{}};

  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) order[static_cast<std::size_t>(i)] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const std::vector<Index> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(stop));
      const MatrixX<Scalar> xb = x(batch, Eigen::all);
      const LabelGrid yb = labels.select_rows(batch);
      LossGradient<Scalar> lg = loss_and_gradient(net, xb, yb, mode);
      epoch_loss += static_cast<double>(lg.loss);

      visit_layers(velocity, lg.gradient, [&](DenseLayer<Scalar>& v, const DenseLayer<Scalar>& g) {
        v.weights = mu * v.weights - lr * g.weights;
        v.bias = mu * v.bias - lr * g.bias;
      });
      visit_layers(net, velocity, [](DenseLayer<Scalar>& w, const DenseLayer<Scalar>& v) {
        w.weights += v.weights;
        w.bias += v.bias;
      });
    }
    rep.epoch_loss.push_back(epoch_loss);
  }
  return net;
}

}  // namespace xdata
