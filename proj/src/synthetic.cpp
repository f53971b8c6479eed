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

#include "xdata/synthetic.hpp"

#include <filesystem>
#include <fstream>

#include "xdata/random.hpp"

namespace xdata {

namespace {

const std::vector<std::string> kQuadrants{"q1", "q2", "q3", "q4"};

std::size_t quadrant(double z1, double z2) {
  if (z1 >= 0.0) return z2 >= 0.0 ? 0 : 3;
  return z2 >= 0.0 ? 1 : 2;
}

arff::Relation header(const std::string& name, Index features, bool emotion, bool dims) {
  arff::Relation rel;
  rel.name = name;
  for (Index j = 0; j < features; ++j) rel.attributes.push_back({"f" + std::to_string(j + 1), arff::Numeric{}});
  if (emotion) rel.attributes.push_back({"emotion", arff::Nominal{kQuadrants}});
  if (dims) {
    rel.attributes.push_back({"arousal", arff::Numeric{}});
    rel.attributes.push_back({"valence", arff::Numeric{}});
  }
  return rel;
}

void add_row(arff::Relation& rel, Rng& rng, const Eigen::MatrixXd& embedding, const SyntheticSpec& spec,
             bool emotion, bool dims) {
  const double z1 = 2.0 * uniform01(rng) - 1.0;
  const double z2 = 2.0 * uniform01(rng) - 1.0;
  std::vector<arff::Value> row;
  for (Index j = 0; j < spec.features; ++j) {
    row.push_back(embedding(j, 0) * z1 + embedding(j, 1) * z2 + spec.feature_noise * standard_normal(rng));
  }
  const double a = z1 + spec.target_noise * standard_normal(rng);
  const double v = z2 + spec.target_noise * standard_normal(rng);
  if (emotion) row.push_back(arff::Nom{quadrant(z1, z2)});
  if (dims) {
    row.push_back(a);
    row.push_back(v);
  }
  rel.rows.push_back(std::move(row));
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  Eigen::MatrixXd embedding(spec.features, 2);
  for (Index j = 0; j < spec.features; ++j) {
    embedding(j, 0) = standard_normal(rng);
    embedding(j, 1) = standard_normal(rng);
  }

  struct Layout {
    bool emotion;
    bool dims;
    int targets;
  };
  const Layout layouts[4] = {{true, true, 3}, {true, false, 1}, {false, true, 2}, {false, false, 0}};

  SyntheticCorpus corpus;
  for (int f = 0; f < 4; ++f) {
    const Layout& l = layouts[f];
    arff::Relation rel = header("synthetic" + std::to_string(f + 1), spec.features, l.emotion, l.dims);
    const Index rows = spec.instances / 4 + (f < spec.instances % 4 ? 1 : 0);
    for (Index i = 0; i < rows; ++i) add_row(rel, rng, embedding, spec, l.emotion, l.dims);
    corpus.files.push_back({std::move(rel), l.targets, "file" + std::to_string(f + 1) + ".arff"});
  }
  corpus.test = header("synthetic_test", spec.features, true, true);
  for (Index i = 0; i < spec.test_instances; ++i) add_row(corpus.test, rng, embedding, spec, true, true);
  return corpus;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::string& dir, const std::string& extra_config) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::ofstream cfg(base / "xdata.cfg");
  cfg << "# Synthetic cross-labeling corpus\n";
  for (std::size_t f = 0; f < corpus.files.size(); ++f) {
    arff::write_file((base / corpus.files[f].label).string(), corpus.files[f].relation);
    cfg << "dataset." << f + 1 << ".file = " << corpus.files[f].label << '\n';
    cfg << "dataset." << f + 1 << ".num_targets = " << corpus.files[f].num_targets << '\n';
  }
  arff::write_file((base / "test.arff").string(), corpus.test);
  cfg << "test.file = test.arff\n";
  cfg << "output.dir = out\n";
  cfg << extra_config;
}

}  // namespace xdata
