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

#include "xdata/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "xdata/random.hpp"

namespace xdata {

const char* to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Binary: return "binary";
    case TaskKind::Multiclass: return "multiclass";
    case TaskKind::Regression: return "regression";
  }
  return "?";
}

LabelGrid::LabelGrid(Index rows, Index tasks)
    : values_(Eigen::MatrixXd::Constant(rows, tasks, std::numeric_limits<double>::quiet_NaN())),
      defined_(Mask::Constant(rows, tasks, false)) {}

LabelCell LabelGrid::cell(Index i, Index m, TaskKind kind) const {
  if (!defined_(i, m)) return Undefined{};
  if (kind == TaskKind::Regression) return values_(i, m);
  return ClassIndex{static_cast<Index>(values_(i, m))};
}

void LabelGrid::clear(Index i, Index m) {
  values_(i, m) = std::numeric_limits<double>::quiet_NaN();
  defined_(i, m) = false;
}

LabelGrid LabelGrid::select_rows(const std::vector<Index>& rows) const {
  LabelGrid out;
  out.values_ = values_(rows, Eigen::all);
  out.defined_ = defined_(rows, Eigen::all);
  return out;
}

bool LabelGrid::operator==(const LabelGrid& other) const {
  if (rows() != other.rows() || tasks() != other.tasks()) return false;
  if ((defined_ != other.defined_).any()) return false;
  for (Index i = 0; i < rows(); ++i) {
    for (Index m = 0; m < tasks(); ++m) {
      if (defined_(i, m) && values_(i, m) != other.values_(i, m)) return false;
    }
  }
  return true;
}

std::optional<Index> MultiTargetDataset::task_index(const std::string& name) const {
  for (Index m = 0; m < num_tasks(); ++m) {
    if (tasks[m].name == name) return m;
  }
  return std::nullopt;
}

MultiTargetDataset MultiTargetDataset::select_rows(const std::vector<Index>& rows) const {
  MultiTargetDataset out;
  out.features = features(rows, Eigen::all);
  out.labels = labels.select_rows(rows);
  out.tasks = tasks;
  out.feature_names = feature_names;
  out.id_attribute = id_attribute;
  for (Index i : rows) {
    out.origin.push_back(origin[i]);
    if (!instance_ids.empty()) out.instance_ids.push_back(instance_ids[i]);
  }
  return out;
}

namespace {

std::string value_text(const arff::Value& v, const arff::AttributeDecl& attr) {
  if (arff::is_missing(v)) return "";
  if (const double* d = std::get_if<double>(&v)) return arff::format_number(*d);
  if (const arff::Nom* n = std::get_if<arff::Nom>(&v)) return attr.categories()[n->index];
  return std::get<arff::Str>(v).text;
}

std::string where(const SourceFile& f, int d) {
  return f.label.empty() ? "dataset " + std::to_string(d) : f.label;
}

}  // namespace

MultiTargetDataset assemble(const std::vector<SourceFile>& files, bool ignore_first_attribute) {
  if (files.empty()) throw DataError("no input datasets given");
  const std::size_t skip = ignore_first_attribute ? 1 : 0;

  MultiTargetDataset ds;
  // Per file: for each target column, the task index and a remap of the
  // file's category indices into the task's category order.
  struct TargetBinding {
    Index task;
    std::vector<Index> class_map;
  };
  std::vector<std::vector<TargetBinding>> bindings(files.size());
  Index total_rows = 0;

  for (std::size_t f = 0; f < files.size(); ++f) {
    const auto& file = files[f];
    const int d = static_cast<int>(f) + 1;
    const auto& attrs = file.relation.attributes;
    if (file.num_targets < 0) throw DataError(where(file, d) + ": negative number of targets");
    if (attrs.size() < skip + static_cast<std::size_t>(file.num_targets)) {
      throw DataError(where(file, d) + ": declares " + std::to_string(attrs.size()) +
                      " attributes, fewer than the " + std::to_string(file.num_targets) +
                      " targets requested");
    }
    const std::size_t first_target = attrs.size() - static_cast<std::size_t>(file.num_targets);

    std::vector<std::string> names;
    for (std::size_t j = skip; j < first_target; ++j) {
      if (!attrs[j].is_numeric()) {
        throw DataError(where(file, d) + ": feature attribute '" + attrs[j].name +
                        "' is not numeric");
      }
      names.push_back(attrs[j].name);
    }
    if (f == 0) {
      ds.feature_names = names;
      if (ignore_first_attribute) ds.id_attribute = attrs.empty() ? "" : attrs[0].name;
    } else if (names != ds.feature_names) {
      throw DataError(where(file, d) + ": feature attributes differ from the first dataset");
    }

    SourceInfo info;
    info.relation_name = file.relation.name;
    info.first_row = total_rows;
    info.num_rows = static_cast<Index>(file.relation.rows.size());

    for (std::size_t j = first_target; j < attrs.size(); ++j) {
      const auto& attr = attrs[j];
      if (attr.is_string()) {
        throw DataError(where(file, d) + ": string attribute '" + attr.name + "' used as target");
      }
      TargetBinding binding{};
      auto existing = ds.task_index(attr.name);
      if (!existing) {
        TaskSchema task;
        task.name = attr.name;
        if (attr.is_nominal()) {
          task.classes = attr.categories();
          if (task.classes.size() < 2) {
            throw DataError(where(file, d) + ": nominal target '" + attr.name +
                            "' needs at least 2 categories");
          }
          task.kind = task.classes.size() == 2 ? TaskKind::Binary : TaskKind::Multiclass;
        } else {
          task.kind = TaskKind::Regression;
        }
        ds.tasks.push_back(std::move(task));
        binding.task = ds.num_tasks() - 1;
      } else {
        binding.task = *existing;
        const auto& task = ds.tasks[*existing];
        if (task.is_classification() != attr.is_nominal()) {
          throw DataError(where(file, d) + ": target '" + attr.name +
                          "' conflicts in kind with an earlier dataset");
        }
        if (attr.is_nominal()) {
          const auto& cats = attr.categories();
          std::set<std::string> a(cats.begin(), cats.end());
          std::set<std::string> b(task.classes.begin(), task.classes.end());
          if (a != b) {
            throw DataError(where(file, d) + ": categories of target '" + attr.name +
                            "' differ from an earlier dataset");
          }
        }
      }
      auto& task = ds.tasks[binding.task];
      if (std::find(task.source_datasets.begin(), task.source_datasets.end(), d) ==
          task.source_datasets.end()) {
        task.source_datasets.push_back(d);
      }
      if (attr.is_nominal()) {
        for (const auto& c : attr.categories()) {
          auto it = std::find(task.classes.begin(), task.classes.end(), c);
          binding.class_map.push_back(static_cast<Index>(it - task.classes.begin()));
        }
      }
      info.task_ids.push_back(binding.task);
      bindings[f].push_back(std::move(binding));
    }
    ds.sources.push_back(std::move(info));
    total_rows += static_cast<Index>(file.relation.rows.size());
  }

  if (ds.tasks.empty()) throw DataError("at least one target task is required (M = 0)");

  const Index n_features = static_cast<Index>(ds.feature_names.size());
  ds.features.resize(total_rows, n_features);
  ds.labels = LabelGrid(total_rows, ds.num_tasks());
  ds.origin.reserve(static_cast<std::size_t>(total_rows));

  Index row = 0;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const auto& file = files[f];
    const int d = static_cast<int>(f) + 1;
    const auto& attrs = file.relation.attributes;
    const std::size_t first_target = attrs.size() - static_cast<std::size_t>(file.num_targets);
    for (std::size_t r = 0; r < file.relation.rows.size(); ++r, ++row) {
      const auto& values = file.relation.rows[r];
      if (ignore_first_attribute) ds.instance_ids.push_back(value_text(values[0], attrs[0]));
      for (std::size_t j = skip; j < first_target; ++j) {
        const auto* x = std::get_if<double>(&values[j]);
        if (!x) {
          throw DataError(where(file, d) + ": missing value for feature '" + attrs[j].name +
                          "' in data row " + std::to_string(r + 1));
        }
        ds.features(row, static_cast<Index>(j - skip)) = *x;
      }
      for (std::size_t t = 0; t < bindings[f].size(); ++t) {
        const auto& binding = bindings[f][t];
        const auto& v = values[first_target + t];
        if (arff::is_missing(v)) continue;
        if (const auto* n = std::get_if<arff::Nom>(&v)) {
          ds.labels.set(row, binding.task, static_cast<double>(binding.class_map[n->index]));
        } else {
          ds.labels.set(row, binding.task, std::get<double>(v));
        }
      }
      ds.origin.push_back(d);
    }
  }
  return ds;
}

SplitView split(const MultiTargetDataset& ds) {
  SplitView view;
  for (Index i = 0; i < ds.size(); ++i) {
    if (ds.labels.row_has_defined(i)) view.labeled.push_back(i);
    if (ds.labels.row_has_undefined(i)) view.incomplete.push_back(i);
  }
  return view;
}

MultiTargetDataset drop_labels(const MultiTargetDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("drop fraction must lie in [0, 1]");
  }
  MultiTargetDataset out = ds;
  Rng rng(seed);
  for (Index m = 0; m < ds.num_tasks(); ++m) {
    std::vector<Index> cells;
    for (Index i = 0; i < ds.size(); ++i) {
      if (ds.labels.defined(i, m)) cells.push_back(i);
    }
    const auto n_drop = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(cells.size())));
    // Partial Fisher-Yates: the first n_drop slots end up a uniform sample.
    for (std::size_t k = 0; k < n_drop; ++k) {
      std::swap(cells[k], cells[k + uniform_index(rng, cells.size() - k)]);
      out.labels.clear(cells[k], m);
    }
  }
  return out;
}

Standardizer Standardizer::identity(Index features, Index tasks) {
  Standardizer s;
  s.feature_mean = Eigen::RowVectorXd::Zero(features);
  s.feature_scale = Eigen::RowVectorXd::Ones(features);
  s.constant.assign(static_cast<std::size_t>(features), false);
  s.target_mean = Eigen::VectorXd::Zero(tasks);
  s.target_scale = Eigen::VectorXd::Ones(tasks);
  return s;
}

Eigen::MatrixXd Standardizer::transform_features(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z = (x.rowwise() - feature_mean).array().rowwise() / feature_scale.array();
  for (Index j = 0; j < z.cols(); ++j) {
    if (constant[static_cast<std::size_t>(j)]) z.col(j).setZero();
  }
  return z;
}

Eigen::MatrixXd Standardizer::inverse_features(const Eigen::MatrixXd& z) const {
  return (z.array().rowwise() * feature_scale.array()).matrix().rowwise() + feature_mean;
}

MultiTargetDataset Standardizer::apply(const MultiTargetDataset& ds) const {
  MultiTargetDataset out = ds;
  out.features = transform_features(ds.features);
  for (Index m = 0; m < ds.num_tasks(); ++m) {
    if (ds.tasks[m].is_classification()) continue;
    for (Index i = 0; i < ds.size(); ++i) {
      if (ds.labels.defined(i, m)) out.labels.set(i, m, target_to_model(m, ds.labels.value(i, m)));
    }
  }
  return out;
}

LabelGrid Standardizer::inverse_labels(const LabelGrid& grid, const std::vector<TaskSchema>& tasks) const {
  LabelGrid out = grid;
  for (Index m = 0; m < grid.tasks(); ++m) {
    if (tasks[m].is_classification()) continue;
    for (Index i = 0; i < grid.rows(); ++i) {
      if (grid.defined(i, m)) out.set(i, m, target_from_model(m, grid.value(i, m)));
    }
  }
  return out;
}

Standardizer fit_standardizer(const MultiTargetDataset& ds) {
  if (ds.size() < 1) throw DataError("cannot standardize an empty dataset");
  Standardizer s = Standardizer::identity(ds.num_features(), ds.num_tasks());
  const double n = static_cast<double>(ds.size());
  s.feature_mean = ds.features.colwise().mean();
  for (Index j = 0; j < ds.num_features(); ++j) {
    const double sd = std::sqrt((ds.features.col(j).array() - s.feature_mean(j)).square().sum() / n);
    if (sd < kConstantColumnThreshold) {
      s.constant[static_cast<std::size_t>(j)] = true;
    } else {
      s.feature_scale(j) = sd;
    }
  }
  for (Index m = 0; m < ds.num_tasks(); ++m) {
    if (ds.tasks[m].is_classification()) continue;
    double sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < ds.size(); ++i) {
      if (ds.labels.defined(i, m)) {
        sum += ds.labels.value(i, m);
        ++count;
      }
    }
    if (count == 0) continue;
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (Index i = 0; i < ds.size(); ++i) {
      if (ds.labels.defined(i, m)) ss += (ds.labels.value(i, m) - mean) * (ds.labels.value(i, m) - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(count));
    s.target_mean(m) = mean;
    if (sd >= kConstantColumnThreshold) s.target_scale(m) = sd;
  }
  return s;
}

std::pair<MultiTargetDataset, Standardizer> standardize(const MultiTargetDataset& ds) {
  Standardizer s = fit_standardizer(ds);
  return {s.apply(ds), std::move(s)};
}

void check_compatible(const MultiTargetDataset& reference, const MultiTargetDataset& other) {
  if (reference.feature_names != other.feature_names) {
    throw DataError("feature attributes of the evaluation set differ from the training data");
  }
  if (reference.num_tasks() != other.num_tasks()) {
    throw DataError("evaluation set has " + std::to_string(other.num_tasks()) + " tasks, expected " +
                    std::to_string(reference.num_tasks()));
  }
  for (Index m = 0; m < reference.num_tasks(); ++m) {
    const auto& a = reference.tasks[m];
    const auto& b = other.tasks[m];
    if (a.name != b.name || a.kind != b.kind || a.classes != b.classes) {
      throw DataError("evaluation task '" + b.name + "' does not match training task '" + a.name + "'");
    }
  }
}

MultiTargetDataset align_tasks(const MultiTargetDataset& other, const std::vector<TaskSchema>& tasks) {
  MultiTargetDataset out = other;
  out.tasks = tasks;
  out.labels = LabelGrid(other.size(), static_cast<Index>(tasks.size()));
  for (const auto& src : other.tasks) {
    bool known = false;
    for (const auto& t : tasks) known = known || t.name == src.name;
    if (!known) throw DataError("task '" + src.name + "' does not occur in the training data");
  }
  for (Index m = 0; m < static_cast<Index>(tasks.size()); ++m) {
    const auto& task = tasks[static_cast<std::size_t>(m)];
    auto src = other.task_index(task.name);
    if (!src) continue;
    const auto& from = other.tasks[static_cast<std::size_t>(*src)];
    if (from.is_classification() != task.is_classification()) {
      throw DataError("task '" + task.name + "' differs in kind from the training data");
    }
    std::vector<Index> class_map;
    if (task.is_classification()) {
      if (std::set<std::string>(from.classes.begin(), from.classes.end()) !=
          std::set<std::string>(task.classes.begin(), task.classes.end())) {
        throw DataError("categories of task '" + task.name + "' differ from the training data");
      }
      for (const auto& c : from.classes) {
        class_map.push_back(static_cast<Index>(std::find(task.classes.begin(), task.classes.end(), c) -
                                               task.classes.begin()));
      }
    }
    for (Index i = 0; i < other.size(); ++i) {
      if (!other.labels.defined(i, *src)) continue;
      const double v = other.labels.value(i, *src);
      out.labels.set(i, m, task.is_classification() ? static_cast<double>(class_map[static_cast<std::size_t>(v)]) : v);
    }
  }
  for (auto& info : out.sources) {
    for (auto& t : info.task_ids) t = *out.task_index(other.tasks[static_cast<std::size_t>(t)].name);
  }
  return out;
}

std::string format_label(const TaskSchema& task, double value) {
  if (task.is_classification()) return task.classes[static_cast<std::size_t>(value)];
  return arff::format_number(value);
}

namespace {

arff::AttributeDecl task_attribute(const TaskSchema& task) {
  if (task.is_classification()) return {task.name, arff::Nominal{task.classes}};
  return {task.name, arff::Numeric{}};
}

arff::Value label_value(const LabelGrid& grid, Index i, Index m, const TaskSchema& task) {
  if (!grid.defined(i, m)) return arff::Missing{};
  if (task.is_classification()) return arff::Nom{static_cast<std::size_t>(grid.value(i, m))};
  return grid.value(i, m);
}

}  // namespace

arff::Relation to_relation(const MultiTargetDataset& ds, const std::string& relation_name) {
  arff::Relation rel;
  rel.name = relation_name;
  if (ds.id_attribute) rel.attributes.push_back({*ds.id_attribute, arff::StringAttr{}});
  for (const auto& name : ds.feature_names) rel.attributes.push_back({name, arff::Numeric{}});
  for (const auto& task : ds.tasks) rel.attributes.push_back(task_attribute(task));

  rel.rows.reserve(static_cast<std::size_t>(ds.size()));
  for (Index i = 0; i < ds.size(); ++i) {
    std::vector<arff::Value> row;
    row.reserve(rel.attributes.size());
    if (ds.id_attribute) row.push_back(arff::Str{ds.instance_ids[static_cast<std::size_t>(i)]});
    for (Index j = 0; j < ds.num_features(); ++j) row.push_back(ds.features(i, j));
    for (Index m = 0; m < ds.num_tasks(); ++m) row.push_back(label_value(ds.labels, i, m, ds.tasks[m]));
    rel.rows.push_back(std::move(row));
  }
  return rel;
}

arff::Relation to_source_relation(const MultiTargetDataset& ds, int d, const SourceFile& original) {
  const auto& info = ds.sources.at(static_cast<std::size_t>(d - 1));
  const auto& attrs = original.relation.attributes;
  const std::size_t first_target = attrs.size() - static_cast<std::size_t>(original.num_targets);

  arff::Relation rel;
  rel.name = original.relation.name;
  rel.attributes = attrs;
  std::vector<Index> appended;
  for (Index m = 0; m < ds.num_tasks(); ++m) {
    if (std::find(info.task_ids.begin(), info.task_ids.end(), m) == info.task_ids.end()) {
      appended.push_back(m);
      rel.attributes.push_back(task_attribute(ds.tasks[m]));
    }
  }

  for (Index r = 0; r < info.num_rows; ++r) {
    const Index i = info.first_row + r;
    std::vector<arff::Value> row(original.relation.rows[static_cast<std::size_t>(r)].begin(),
                                 original.relation.rows[static_cast<std::size_t>(r)].begin() +
                                     static_cast<std::ptrdiff_t>(first_target));
    for (std::size_t t = 0; t < info.task_ids.size(); ++t) {
      const Index m = info.task_ids[t];
      const auto& task = ds.tasks[m];
      if (!ds.labels.defined(i, m)) {
        row.push_back(arff::Missing{});
      } else if (task.is_classification()) {
        // Back into this file's own category order.
        const auto& cats = attrs[first_target + t].categories();
        const auto& name = task.classes[static_cast<std::size_t>(ds.labels.value(i, m))];
        row.push_back(arff::Nom{static_cast<std::size_t>(
            std::find(cats.begin(), cats.end(), name) - cats.begin())});
      } else {
        row.push_back(ds.labels.value(i, m));
      }
    }
    for (Index m : appended) row.push_back(label_value(ds.labels, i, m, ds.tasks[m]));
    rel.rows.push_back(std::move(row));
  }
  return rel;
}

}  // namespace xdata
