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

#include "xdata/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "xdata/arff.hpp"

namespace xdata {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Entry {
  std::string value;
  std::size_t line;
};

class Reader {
 public:
  Reader(const std::string& key, const Entry& e) : key_(key), e_(e) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(e_.line) + ": key '" + key_ + "': " + what);
  }

  long long integer() const {
    long long v = 0;
    const std::string& s = e_.value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) fail("expected an integer, got '" + s + "'");
    return v;
  }

  long long integer_at_least(long long lo) const {
    const long long v = integer();
    if (v < lo) fail("must be at least " + std::to_string(lo));
    return v;
  }

  double real() const {
    double v = 0.0;
    const std::string& s = e_.value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail("expected a real number, got '" + s + "'");
    }
    return v;
  }

  bool boolean() const {
    const std::string& s = e_.value;
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail("expected true or false, got '" + s + "'");
  }

  std::vector<Index> sizes() const {
    std::vector<Index> out;
    std::string_view rest = e_.value;
    if (trim(rest).empty()) return out;
    while (true) {
      const auto comma = rest.find(',');
      const std::string part(trim(rest.substr(0, comma)));
      Index v = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size() || v < 1) {
        fail("expected a comma-separated list of positive sizes, got '" + e_.value + "'");
      }
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  const std::string& text() const {
    if (e_.value.empty()) fail("value is empty");
    return e_.value;
  }

 private:
  const std::string& key_;
  const Entry& e_;
};

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

std::string join_sizes(const std::vector<Index>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) out += (i ? "," : "") + std::to_string(sizes[i]);
  return out;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& base_dir) {
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!entries.emplace(key, Entry{value, line_no}).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' given twice");
    }
  }

  RunConfig cfg;
  NetworkConfig& net = cfg.cdlc.network;
  std::map<int, DatasetEntry> datasets;
  std::set<int> dataset_files;

  for (const auto& [key, entry] : entries) {
    Reader r(key, entry);
    if (key.rfind("dataset.", 0) == 0) {
      const std::string rest = key.substr(8);
      const auto dot = rest.find('.');
      int n = 0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + (dot == std::string::npos ? rest.size() : dot), n);
      if (dot == std::string::npos || ec != std::errc{} || ptr != rest.data() + dot || n < 1) {
        r.fail("unknown key");
      }
      const std::string field = rest.substr(dot + 1);
      if (field == "file") {
        datasets[n].file = resolve(r.text(), base_dir);
        dataset_files.insert(n);
      } else if (field == "num_targets") {
        datasets[n].num_targets = static_cast<int>(r.integer_at_least(0));
      } else {
        r.fail("unknown key");
      }
    } else if (key == "test.file") {
      cfg.test_file = resolve(r.text(), base_dir);
    } else if (key == "output.dir") {
      cfg.output_dir = resolve(r.text(), base_dir);
    } else if (key == "output.per_source") {
      cfg.per_source_output = r.boolean();
    } else if (key == "data.ignore_first_attribute") {
      cfg.ignore_first_attribute = r.boolean();
    } else if (key == "drop.fraction") {
      const double f = r.real();
      if (f < 0.0 || f > 1.0) r.fail("must lie in [0, 1]");
      cfg.drop_fraction = f;
    } else if (key == "drop.seed") {
      cfg.drop_seed = static_cast<std::uint64_t>(r.integer_at_least(0));
    } else if (key == "cdlc.select_per_task") {
      cfg.cdlc.select_per_task = r.integer_at_least(1);
    } else if (key == "cdlc.max_iterations") {
      cfg.cdlc.max_iterations = static_cast<int>(r.integer_at_least(1));
    } else if (key.rfind("cdlc.min_confidence.", 0) == 0) {
      const std::string task = key.substr(20);
      if (task.empty()) r.fail("missing task name");
      cfg.cdlc.min_confidence[task] = r.real();
    } else if (key == "cdlc.retrain_from_scratch") {
      cfg.cdlc.retrain_from_scratch = r.boolean();
    } else if (key == "cdlc.eval_every_iteration") {
      cfg.cdlc.eval_every_iteration = r.boolean();
    } else if (key == "net.shared_layers") {
      net.shared_layer_sizes = r.sizes();
    } else if (key.rfind("net.head_layers.", 0) == 0) {
      const std::string task = key.substr(16);
      if (task.empty()) r.fail("missing task name");
      net.head_hidden_sizes[task] = r.sizes();
    } else if (key == "net.dropout") {
      const double p = r.real();
      if (p < 0.0 || p >= 1.0) r.fail("must lie in [0, 1)");
      net.dropout_rate = p;
    } else if (key == "net.activation") {
      if (entry.value == "tanh") {
        net.hidden_activation = Activation::Tanh;
      } else if (entry.value == "relu") {
        net.hidden_activation = Activation::Relu;
      } else {
        r.fail("expected tanh or relu");
      }
    } else if (key == "net.epochs") {
      net.epochs = static_cast<int>(r.integer_at_least(1));
    } else if (key == "net.learning_rate") {
      const double lr = r.real();
      if (lr <= 0.0) r.fail("must be positive");
      net.learning_rate = lr;
    } else if (key == "net.momentum") {
      const double mu = r.real();
      if (mu < 0.0 || mu >= 1.0) r.fail("must lie in [0, 1)");
      net.momentum = mu;
    } else if (key == "net.batch_size") {
      net.batch_size = r.integer_at_least(1);
    } else if (key == "net.mc_passes") {
      net.mc_passes = static_cast<int>(r.integer_at_least(1));
    } else if (key == "net.seed") {
      net.seed = static_cast<std::uint64_t>(r.integer_at_least(0));
    } else {
      r.fail("unknown key");
    }
  }

  if (!dataset_files.count(1)) throw ConfigError("missing mandatory key 'dataset.1.file'");
  if (cfg.output_dir.empty()) throw ConfigError("missing mandatory key 'output.dir'");
  int expected = 1;
  for (const auto& [n, d] : datasets) {
    if (n != expected) {
      throw ConfigError("dataset entries must be numbered 1, 2, ... without gaps; 'dataset." +
                        std::to_string(expected) + ".file' is missing");
    }
    if (!dataset_files.count(n)) {
      throw ConfigError("missing key 'dataset." + std::to_string(n) + ".file'");
    }
    cfg.datasets.push_back(d);
    ++expected;
  }
  if (net.dropout_rate > 0.0 && net.mc_passes < 2) {
    throw ConfigError("key 'net.mc_passes': must be at least 2 when net.dropout > 0");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string describe(const RunConfig& c) {
  std::ostringstream out;
  const auto& net = c.cdlc.network;
  for (std::size_t d = 0; d < c.datasets.size(); ++d) {
    out << "dataset." << d + 1 << ".file = " << c.datasets[d].file << '\n';
    out << "dataset." << d + 1 << ".num_targets = " << c.datasets[d].num_targets << '\n';
  }
  out << "test.file = " << c.test_file.value_or("") << '\n';
  out << "output.dir = " << c.output_dir << '\n';
  out << "output.per_source = " << (c.per_source_output ? "true" : "false") << '\n';
  out << "data.ignore_first_attribute = " << (c.ignore_first_attribute ? "true" : "false") << '\n';
  out << "drop.fraction = " << (c.drop_fraction ? arff::format_number(*c.drop_fraction) : "") << '\n';
  out << "drop.seed = " << c.drop_seed << '\n';
  out << "cdlc.select_per_task = " << c.cdlc.select_per_task << '\n';
  out << "cdlc.max_iterations = " << (c.cdlc.max_iterations ? std::to_string(*c.cdlc.max_iterations) : "") << '\n';
  for (const auto& [task, v] : c.cdlc.min_confidence) {
    out << "cdlc.min_confidence." << task << " = " << arff::format_number(v) << '\n';
  }
  out << "cdlc.retrain_from_scratch = " << (c.cdlc.retrain_from_scratch ? "true" : "false") << '\n';
  out << "cdlc.eval_every_iteration = " << (c.cdlc.eval_every_iteration ? "true" : "false") << '\n';
  out << "net.shared_layers = " << join_sizes(net.shared_layer_sizes) << '\n';
  for (const auto& [task, sizes] : net.head_hidden_sizes) {
    out << "net.head_layers." << task << " = " << join_sizes(sizes) << '\n';
  }
  out << "net.dropout = " << arff::format_number(net.dropout_rate) << '\n';
  out << "net.activation = " << (net.hidden_activation == Activation::Tanh ? "tanh" : "relu") << '\n';
  out << "net.epochs = " << net.epochs << '\n';
  out << "net.learning_rate = " << arff::format_number(net.learning_rate) << '\n';
  out << "net.momentum = " << arff::format_number(net.momentum) << '\n';
  out << "net.batch_size = " << net.batch_size << '\n';
  out << "net.mc_passes = " << net.mc_passes << '\n';
  out << "net.seed = " << net.seed << '\n';
  return out.str();
}

}  // namespace xdata
