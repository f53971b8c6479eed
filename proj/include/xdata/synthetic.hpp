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
#include <string>
#include <vector>

#include "xdata/arff.hpp"
#include "xdata/dataset.hpp"

namespace xdata {

/// A four-file corpus with disjoint label spaces generated from a 2-D latent
/// point z ~ U[-1, 1]^2. Features are a noisy random linear embedding of z;
/// `emotion` is the quadrant of z (4 classes); `arousal` and `valence` are
/// the two coordinates plus Gaussian noise.
///
///   file 1: emotion, arousal, valence
///   file 2: emotion
///   file 3: arousal, valence
///   file 4: no targets
struct SyntheticSpec {
  Index instances = 2500;       // split evenly over the four files
  Index test_instances = 500;
  Index features = 10;
  double feature_noise = 0.1;
  double target_noise = 0.1;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<SourceFile> files;
  arff::Relation test;  // all three targets
};

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec);

/// Writes file1.arff .. file4.arff, test.arff and a matching xdata.cfg into `dir`.
void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::string& dir,
                            const std::string& extra_config = "");

}  // namespace xdata
