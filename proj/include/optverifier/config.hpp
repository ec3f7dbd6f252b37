// Copyright 2026 The OptVerifier Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Flat "key = value" configuration files. Lines starting with '#' and blank
// lines are ignored; unknown keys are errors.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "optverifier/agents.hpp"
#include "optverifier/gateway.hpp"
#include "optverifier/pipeline.hpp"

namespace optverifier {

using ConfigValues = std::map<std::string, std::string>;

// Throws CONFIG_ERROR naming the line for malformed lines or repeated keys.
ConfigValues ParseConfigText(std::string_view text);
ConfigValues LoadConfigFile(const std::filesystem::path& path);

struct Settings {
  PipelineConfig pipeline;
  GatewayConfig gateway;
  LiveConfig live;
  LlmAgentOptions agents;
  int jobs = 1;
  // Solving-accuracy tolerances.
  double tol_abs = 1e-6;
  double tol_rel = 1e-4;
  // Perturbation study.
  int perturb_k = 9;
  std::uint64_t perturb_seed = 7;
  std::vector<std::string> perturb_ops;  // empty = all
};

// Every recognized key with a one-line description.
const std::vector<std::pair<std::string, std::string>>& ConfigKeys();

// Applies `values` on top of `settings`; throws CONFIG_ERROR for unknown keys
// or unparsable values.
void ApplyConfig(const ConfigValues& values, Settings& settings);

}  // namespace optverifier
