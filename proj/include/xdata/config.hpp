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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xdata/trainer.hpp"

namespace xdata {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetEntry {
  std::string file;
  int num_targets = 0;
};

struct RunConfig {
  std::vector<DatasetEntry> datasets;
  std::optional<std::string> test_file;
  std::string output_dir;
  std::optional<double> drop_fraction;
  std::uint64_t drop_seed = 1;
  bool ignore_first_attribute = false;
  bool per_source_output = false;
  CdlcConfig cdlc;
};

/// Parses `key = value` lines (`#` starts a comment). Unknown keys, repeated
/// keys and malformed values are errors naming the line and key. Relative
/// file paths are resolved against `base_dir` when it is non-empty.
RunConfig parse_config(std::string_view text, const std::string& base_dir = "");

RunConfig load_config(const std::string& path);

/// The effective configuration, every key spelled out, one per line.
std::string describe(const RunConfig& config);

}  // namespace xdata
