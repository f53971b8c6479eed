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

#include <istream>
#include <ostream>

#include "xdata/model.hpp"

namespace xdata {

inline constexpr int kCheckpointVersion = 1;

/// Text checkpoint: a `xdata-mtshl <version>` header, the inference-relevant
/// config, then every layer as "layer <in> <out>" followed by weights and bias.
void save_checkpoint(std::ostream& out, const MtShlNetwork<double>& net);
MtShlNetwork<double> load_checkpoint(std::istream& in);

}  // namespace xdata
