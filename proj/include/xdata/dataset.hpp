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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "xdata/arff.hpp"

namespace xdata {

using Index = Eigen::Index;

/// Input data that cannot be assembled into a consistent multi-target dataset.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TaskKind { Binary, Multiclass, Regression };

const char* to_string(TaskKind kind);

/// One target dimension of the joint label space.
struct TaskSchema {
  std::string name;
  TaskKind kind = TaskKind::Regression;
  std::vector<std::string> classes;  // empty for regression
  std::vector<int> source_datasets;  // 1-based file indices declaring this task

  bool is_classification() const { return kind != TaskKind::Regression; }
  Index class_count() const { return static_cast<Index>(classes.size()); }

  bool operator==(const TaskSchema&) const = default;
};

struct Undefined {
  bool operator==(const Undefined&) const = default;
};
struct ClassIndex {
  Index value;
  bool operator==(const ClassIndex&) const = default;
};
using LabelCell = std::variant<Undefined, ClassIndex, double>;

/// N x M label matrix with an explicit defined-mask. Undefined cells hold NaN
/// in storage; nothing downstream may read them.
class LabelGrid {
 public:
  using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

  LabelGrid() = default;
  LabelGrid(Index rows, Index tasks);

  Index rows() const { return values_.rows(); }
  Index tasks() const { return values_.cols(); }

  bool defined(Index i, Index m) const { return defined_(i, m); }
  double value(Index i, Index m) const { return values_(i, m); }
  LabelCell cell(Index i, Index m, TaskKind kind) const;

  void set(Index i, Index m, double v) {
    values_(i, m) = v;
    defined_(i, m) = true;
  }
  void clear(Index i, Index m);

  Index defined_count(Index m) const { return defined_.col(m).count(); }
  Index undefined_count(Index m) const { return rows() - defined_count(m); }
  Index undefined_count() const { return defined_.size() - defined_.count(); }
  bool row_has_defined(Index i) const { return defined_.row(i).any(); }
  bool row_has_undefined(Index i) const { return !defined_.row(i).all(); }

  const Eigen::MatrixXd& values() const { return values_; }
  /// Raw storage, including the payload of undefined cells.
  Eigen::MatrixXd& raw_values() { return values_; }
  const Mask& mask() const { return defined_; }

  LabelGrid select_rows(const std::vector<Index>& rows) const;

  /// Equal masks and equal values on defined cells.
  bool operator==(const LabelGrid& other) const;

 private:
  Eigen::MatrixXd values_;
  Mask defined_;
};

/// One pseudo-label written into the grid. `value` is in target units:
/// a class index for classification, the decoded real for regression.
struct PseudoLabelAssignment {
  Index instance = 0;
  Index task = 0;
  double value = 0.0;
  double confidence = 0.0;
  int iteration = 0;

  bool operator==(const PseudoLabelAssignment&) const = default;
};

/// Bookkeeping for one input file, used for per-file write-back.
struct SourceInfo {
  std::string relation_name;
  std::vector<Index> task_ids;  // tasks declared by the file, in file order
  Index first_row = 0;
  Index num_rows = 0;
};

struct MultiTargetDataset {
  Eigen::MatrixXd features;  // N x F
  LabelGrid labels;          // N x M
  std::vector<TaskSchema> tasks;
  std::vector<int> origin;   // 1-based source file per instance
  std::vector<std::string> feature_names;
  std::optional<std::string> id_attribute;  // name of an ignored leading column
  std::vector<std::string> instance_ids;    // its values, as text
  std::vector<SourceInfo> sources;

  Index size() const { return features.rows(); }
  Index num_features() const { return features.cols(); }
  Index num_tasks() const { return static_cast<Index>(tasks.size()); }
  std::optional<Index> task_index(const std::string& name) const;

  /// Same rows, features and labels; `rows` are indices into this dataset.
  MultiTargetDataset select_rows(const std::vector<Index>& rows) const;
};

struct SourceFile {
  arff::Relation relation;
  int num_targets = 0;
  std::string label;  // file path or other name used in diagnostics
};

/// Joins the files over the union of their target attributes (matched by name).
MultiTargetDataset assemble(const std::vector<SourceFile>& files, bool ignore_first_attribute);

struct SplitView {
  std::vector<Index> labeled;     // at least one defined label
  std::vector<Index> incomplete;  // at least one undefined label
};

SplitView split(const MultiTargetDataset& ds);

/// Per task, blanks exactly floor(fraction * defined) cells chosen uniformly
/// without replacement. Deterministic in `seed`.
MultiTargetDataset drop_labels(const MultiTargetDataset& ds, double fraction, std::uint64_t seed);

/// Feature z-scoring over all rows plus regression-target z-scoring over
/// defined cells. Classification tasks map through unchanged.
struct Standardizer {
  Eigen::RowVectorXd feature_mean;
  Eigen::RowVectorXd feature_scale;
  std::vector<bool> constant;
  Eigen::VectorXd target_mean;
  Eigen::VectorXd target_scale;

  static Standardizer identity(Index features, Index tasks);

  Eigen::MatrixXd transform_features(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd inverse_features(const Eigen::MatrixXd& z) const;
  double target_to_model(Index m, double v) const { return (v - target_mean(m)) / target_scale(m); }
  double target_from_model(Index m, double v) const { return v * target_scale(m) + target_mean(m); }

  /// Applies the fitted transform to a dataset with the same schema.
  MultiTargetDataset apply(const MultiTargetDataset& ds) const;
  LabelGrid inverse_labels(const LabelGrid& grid, const std::vector<TaskSchema>& tasks) const;
};

inline constexpr double kConstantColumnThreshold = 1e-12;

Standardizer fit_standardizer(const MultiTargetDataset& ds);
std::pair<MultiTargetDataset, Standardizer> standardize(const MultiTargetDataset& ds);

/// Re-expresses the labels of `other` in the task and class order of `tasks`,
/// matching by name. Tasks absent from `other` become all-undefined columns.
MultiTargetDataset align_tasks(const MultiTargetDataset& other, const std::vector<TaskSchema>& tasks);

/// Throws DataError unless both datasets share feature names and task schemas.
void check_compatible(const MultiTargetDataset& reference, const MultiTargetDataset& other);

/// One merged relation: optional id column, all features, then all M targets.
arff::Relation to_relation(const MultiTargetDataset& ds, const std::string& relation_name);

/// Rows of source file `d` (1-based) with the file's original attributes,
/// its target columns filled from `ds`, and the remaining tasks appended.
arff::Relation to_source_relation(const MultiTargetDataset& ds, int d, const SourceFile& original);

/// Label text for output: category name or the real value.
std::string format_label(const TaskSchema& task, double value);

}  // namespace xdata
