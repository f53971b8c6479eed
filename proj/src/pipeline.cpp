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

#include "xdata/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "xdata/arff.hpp"

namespace xdata {

namespace fs = std::filesystem;

namespace {

arff::Relation read_relation(const std::string& path) {
  if (!fs::is_regular_file(path)) throw DataError("cannot open input file '" + path + "'");
  try {
    return arff::read_file(path);
  } catch (const arff::ArffError& e) {
    throw DataError(e.what());
  }
}

std::string number_or_empty(double v) { return std::isnan(v) ? "" : arff::format_number(v); }

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void write_metrics(std::ostream& out, const MetricReport& report) {
  for (const auto& t : report.tasks) {
    out << "  " << t.task << " (" << to_string(t.kind) << ", n=" << t.evaluated << "): ";
    if (!t.note.empty()) {
      out << t.note << '\n';
      continue;
    }
    if (t.kind == TaskKind::Regression) {
      out << "CC " << arff::format_number(t.cc) << '\n';
    } else {
      out << "UAR " << arff::format_number(t.uar) << "  recalls [";
      for (Index k = 0; k < t.class_recall.size(); ++k) {
        out << (k ? " " : "") << (std::isnan(t.class_recall(k)) ? std::string("-") : arff::format_number(t.class_recall(k)));
      }
      out << "]\n";
    }
  }
}

void write_report(std::ostream& out, const RunConfig& config, const PipelineOutcome& outcome) {
  const auto& tasks = outcome.completed.tasks;
  out << "# Effective configuration\n" << describe(config) << '\n';
  out << "# Data\n";
  out << "instances = " << outcome.completed.size() << '\n';
  out << "features = " << outcome.completed.num_features() << '\n';
  for (const auto& t : tasks) {
    out << "task " << t.name << " = " << to_string(t.kind);
    if (t.is_classification()) out << " (" << t.class_count() << " classes)";
    out << '\n';
  }
  out << "\n# Label completion\n";
  out << "status = " << to_string(outcome.cdlc.status) << '\n';
  out << "iterations = " << outcome.cdlc.iterations.size() << '\n';
  out << "assignments = " << outcome.cdlc.assignments.size() << '\n';
  for (const auto& rec : outcome.cdlc.iterations) {
    out << "\niteration " << rec.iteration << " (" << arff::format_number(rec.duration.count()) << " s)\n";
    for (std::size_t m = 0; m < tasks.size(); ++m) {
      const auto& p = rec.tasks[m];
      out << "  " << tasks[m].name << ": filled " << p.filled << ", remaining " << p.remaining;
      if (p.filled > 0) out << ", boundary confidence " << arff::format_number(p.boundary_confidence);
      out << '\n';
    }
    if (rec.metrics) {
      out << " test metrics (model trained at the start of this iteration):\n";
      write_metrics(out, *rec.metrics);
    }
  }
  if (outcome.final_metrics) {
    out << "\n# Test metrics, model retrained on the completed data\n";
    write_metrics(out, *outcome.final_metrics);
  }
  if (outcome.withheld) {
    out << "\n# Pseudo-label quality against withheld labels (diagnostic)\n";
    for (const auto& q : outcome.pseudo_quality) {
      out << "  " << q.task << ": comparable " << q.comparable << ", without truth " << q.skipped;
      if (q.comparable == 0) {
        out << ", 0 comparable cells\n";
        continue;
      }
      if (q.kind == TaskKind::Regression) {
        out << ", CC " << number_or_empty(q.cc) << ", MAE " << arff::format_number(q.mae) << '\n';
      } else {
        out << ", accuracy " << arff::format_number(q.accuracy) << '\n';
        for (const auto& it : q.per_iteration) {
          out << "    iteration " << it.iteration << ": " << arff::format_number(it.accuracy) << " over "
              << it.comparable << '\n';
        }
      }
    }
  }
  if (!outcome.cdlc.warnings.empty()) {
    out << "\n# Warnings\n";
    for (const auto& w : outcome.cdlc.warnings) out << "  " << w << '\n';
  }
}

void write_scatter(const fs::path& dir, const MetricReport& report) {
  for (const auto& t : report.tasks) {
    auto out = open_output(dir / ("scatter_" + t.task + ".csv"));
    out << "true,predicted\n";
    for (std::size_t i = 0; i < t.truth.size(); ++i) {
      out << arff::format_number(t.truth[i]) << ',' << arff::format_number(t.predicted[i]) << '\n';
    }
  }
}

}  // namespace

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_assignments_csv(std::ostream& out, const MultiTargetDataset& ds,
                           const std::vector<PseudoLabelAssignment>& assignments) {
  out << "iteration,instance,dataset_origin,task,label,confidence\n";
  for (const auto& a : assignments) {
    const auto& task = ds.tasks[static_cast<std::size_t>(a.task)];
    out << a.iteration << ',' << a.instance << ',' << ds.origin[static_cast<std::size_t>(a.instance)] << ','
        << csv_field(task.name) << ',' << csv_field(format_label(task, a.value)) << ','
        << arff::format_number(a.confidence) << '\n';
  }
}

void write_iterations_csv(std::ostream& out, const std::vector<TaskSchema>& tasks,
                          const std::vector<IterationRecord>& records) {
  const bool with_metrics = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.metrics.has_value(); });
  out << "iteration";
  for (const auto& t : tasks) {
    out << ',' << csv_field("filled_" + t.name) << ',' << csv_field("confidence_" + t.name) << ','
        << csv_field("remaining_" + t.name);
  }
  if (with_metrics) {
    for (const auto& t : tasks) out << ',' << csv_field((t.is_classification() ? "uar_" : "cc_") + t.name);
  }
  out << '\n';
  for (const auto& r : records) {
    out << r.iteration;
    for (const auto& p : r.tasks) {
      out << ',' << p.filled << ',' << number_or_empty(p.boundary_confidence) << ',' << p.remaining;
    }
    if (with_metrics) {
      for (std::size_t m = 0; m < tasks.size(); ++m) {
        out << ',' << (r.metrics ? number_or_empty(r.metrics->tasks[m].score()) : "");
      }
    }
    out << '\n';
  }
}

std::vector<SourceFile> load_sources(const RunConfig& config) {
  std::vector<SourceFile> files;
  for (const auto& entry : config.datasets) {
    files.push_back({read_relation(entry.file), entry.num_targets, entry.file});
  }
  return files;
}

PipelineOutcome run_pipeline(const RunConfig& config, std::ostream* log) {
  auto note = [&](const std::string& msg) {
    if (log) *log << "xdata: " << msg << std::endl;
  };

  const auto sources = load_sources(config);
  MultiTargetDataset ds = assemble(sources, config.ignore_first_attribute);
  note("assembled " + std::to_string(ds.size()) + " instances, " + std::to_string(ds.num_features()) +
       " features, " + std::to_string(ds.num_tasks()) + " tasks, " + std::to_string(ds.labels.undefined_count()) +
       " undefined cells");

  PipelineOutcome outcome;
  if (config.drop_fraction) {
    outcome.withheld = ds.labels;
    ds = drop_labels(ds, *config.drop_fraction, config.drop_seed);
    note("dropped labels, " + std::to_string(ds.labels.undefined_count()) + " undefined cells now");
  }

  auto [model_ds, scaling] = standardize(ds);

  std::optional<MultiTargetDataset> eval_model;
  if (config.test_file) {
    const arff::Relation test_rel = read_relation(*config.test_file);
    const std::size_t skip = config.ignore_first_attribute ? 1 : 0;
    const auto n_features = static_cast<std::size_t>(ds.num_features());
    if (test_rel.attributes.size() < skip + n_features) {
      throw DataError(*config.test_file + ": fewer attributes than the training feature space");
    }
    const int test_targets = static_cast<int>(test_rel.attributes.size() - skip - n_features);
    MultiTargetDataset test = assemble({{test_rel, test_targets, *config.test_file}}, config.ignore_first_attribute);
    test = align_tasks(test, ds.tasks);
    check_compatible(ds, test);
    eval_model = scaling.apply(test);
  }

  outcome.cdlc = run_cdlc(model_ds, config.cdlc, scaling, eval_model ? &*eval_model : nullptr);
  for (const auto& rec : outcome.cdlc.iterations) {
    Index filled = 0;
    for (const auto& p : rec.tasks) filled += p.filled;
    note("iteration " + std::to_string(rec.iteration) + ": " + std::to_string(filled) + " cells filled");
  }
  note(std::string("label completion ") + to_string(outcome.cdlc.status));

  outcome.completed = apply_assignments(ds, outcome.cdlc.assignments);
  if (outcome.withheld) {
    outcome.pseudo_quality = pseudo_label_accuracy(outcome.cdlc.assignments, *outcome.withheld, ds.tasks);
  }
  if (eval_model) {
    NetworkConfig net_config = config.cdlc.network;
    net_config.seed += outcome.cdlc.iterations.size();
    Rng rng(net_config.seed);
    const auto& work = outcome.cdlc.completed;
    const SplitView view = split(work);
    auto net = init_network<double>(net_config, work.num_features(), work.tasks);
    net = train(net, Eigen::MatrixXd(work.features(view.labeled, Eigen::all)), work.labels.select_rows(view.labeled), rng);
    outcome.final_metrics = evaluate(net, *eval_model, &scaling);
  }

  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  arff::write_file((dir / "completed.arff").string(), to_relation(outcome.completed, "completed"));
  if (config.per_source_output) {
    for (std::size_t d = 0; d < sources.size(); ++d) {
      const auto name = "completed_" + std::to_string(d + 1) + ".arff";
      arff::write_file((dir / name).string(), to_source_relation(outcome.completed, static_cast<int>(d) + 1, sources[d]));
    }
  }
  {
    auto out = open_output(dir / "assignments.csv");
    write_assignments_csv(out, outcome.completed, outcome.cdlc.assignments);
  }
  {
    auto out = open_output(dir / "iterations.csv");
    write_iterations_csv(out, ds.tasks, outcome.cdlc.iterations);
  }
  {
    auto out = open_output(dir / "report.txt");
    write_report(out, config, outcome);
  }
  if (outcome.final_metrics) write_scatter(dir, *outcome.final_metrics);
  note("wrote results to " + dir.string());
  return outcome;
}

}  // namespace xdata
