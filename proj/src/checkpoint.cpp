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

#include "xdata/checkpoint.hpp"

#include <stdexcept>
#include <string>

#include "xdata/arff.hpp"

namespace xdata {

namespace {

const char* kind_name(TaskKind k) { return to_string(k); }

TaskKind parse_kind(const std::string& s) {
  if (s == "binary") return TaskKind::Binary;
  if (s == "multiclass") return TaskKind::Multiclass;
  if (s == "regression") return TaskKind::Regression;
  throw std::runtime_error("checkpoint: unknown task kind '" + s + "'");
}

void write_layer(std::ostream& out, const DenseLayer<double>& layer) {
  out << "layer " << layer.fan_in() << ' ' << layer.fan_out() << '\n';
  for (Index r = 0; r < layer.fan_in(); ++r) {
    for (Index c = 0; c < layer.fan_out(); ++c) out << (c ? " " : "") << arff::format_number(layer.weights(r, c));
    out << '\n';
  }
  for (Index c = 0; c < layer.fan_out(); ++c) out << (c ? " " : "") << arff::format_number(layer.bias(c));
  out << '\n';
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) {
    throw std::runtime_error("checkpoint: expected '" + word + "', found '" + got + "'");
  }
}

DenseLayer<double> read_layer(std::istream& in) {
  expect(in, "layer");
  Index rows = 0;
  Index cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) throw std::runtime_error("checkpoint: bad layer shape");
  auto layer = DenseLayer<double>::zeros(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) in >> layer.weights(r, c);
  }
  for (Index c = 0; c < cols; ++c) in >> layer.bias(c);
  if (!in) throw std::runtime_error("checkpoint: truncated layer");
  return layer;
}

}  // namespace

void save_checkpoint(std::ostream& out, const MtShlNetwork<double>& net) {
  out << "xdata-mtshl " << kCheckpointVersion << '\n';
  out << "input_dim " << net.input_dim << '\n';
  out << "activation " << (net.config.hidden_activation == Activation::Tanh ? "tanh" : "relu") << '\n';
  out << "dropout " << arff::format_number(net.config.dropout_rate) << '\n';
  out << "mc_passes " << net.config.mc_passes << '\n';
  out << "trunk " << net.trunk.size() << '\n';
  for (const auto& layer : net.trunk) write_layer(out, layer);
  out << "heads " << net.heads.size() << '\n';
  for (const auto& head : net.heads) {
    out << "head " << kind_name(head.kind) << ' ' << head.hidden.size() << '\n';
    for (const auto& layer : head.hidden) write_layer(out, layer);
    write_layer(out, head.output);
  }
}

MtShlNetwork<double> load_checkpoint(std::istream& in) {
  expect(in, "xdata-mtshl");
  int version = 0;
  in >> version;
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  MtShlNetwork<double> net;
  std::string act;
  expect(in, "input_dim");
  in >> net.input_dim;
  expect(in, "activation");
  in >> act;
  if (act != "tanh" && act != "relu") throw std::runtime_error("checkpoint: unknown activation '" + act + "'");
  net.config.hidden_activation = act == "tanh" ? Activation::Tanh : Activation::Relu;
  expect(in, "dropout");
  in >> net.config.dropout_rate;
  expect(in, "mc_passes");
  in >> net.config.mc_passes;
  std::size_t n = 0;
  expect(in, "trunk");
  in >> n;
  net.config.shared_layer_sizes.clear();
  for (std::size_t l = 0; l < n; ++l) {
    net.trunk.push_back(read_layer(in));
    net.config.shared_layer_sizes.push_back(net.trunk.back().fan_out());
  }
  expect(in, "heads");
  in >> n;
  for (std::size_t m = 0; m < n; ++m) {
    TaskHead<double> head;
    std::string kind;
    std::size_t hidden = 0;
    expect(in, "head");
    in >> kind >> hidden;
    head.kind = parse_kind(kind);
    for (std::size_t l = 0; l < hidden; ++l) head.hidden.push_back(read_layer(in));
    head.output = read_layer(in);
    net.heads.push_back(std::move(head));
  }
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return net;
}

}  // namespace xdata
