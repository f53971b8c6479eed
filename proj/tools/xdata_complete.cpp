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

// xdata-complete: fills the missing labels of a set of ARFF datasets.
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime failure.

#include <CLI11.hpp>
#include <iostream>

#include "xdata/arff.hpp"
#include "xdata/config.hpp"
#include "xdata/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cross-data label completion for ARFF datasets"};
  app.name("xdata-complete");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "Run configuration file")->required();
  app.add_option("--seed", seed, "Override net.seed");
  app.add_option("--out-dir", out_dir, "Override output.dir");
  app.add_flag("--quiet", quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    xdata::RunConfig config = xdata::load_config(config_path);
    if (seed) config.cdlc.network.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    xdata::run_pipeline(config, quiet ? nullptr : &std::cerr);
  } catch (const xdata::ConfigError& e) {
    std::cerr << "xdata-complete: configuration error: " << e.what() << '\n';
    return 1;
  } catch (const xdata::DataError& e) {
    std::cerr << "xdata-complete: data error: " << e.what() << '\n';
    return 2;
  } catch (const xdata::arff::ArffError& e) {
    std::cerr << "xdata-complete: data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "xdata-complete: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
