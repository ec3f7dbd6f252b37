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

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "optverifier/library.hpp"
#include "optverifier/model.hpp"

namespace optverifier::testing {

inline std::filesystem::path DataPath(const std::string& name) {
  return std::filesystem::path(OPTVERIFIER_TEST_DATA) / name;
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline const OptimizationModel& LibraryModel(const std::string& name) {
  return ModelLibrary::Builtin().Get(name).model;
}

// Loads a model file, unwrapping library entries.
inline OptimizationModel LoadModelFile(const std::filesystem::path& path) {
  Json doc = Json::parse(ReadText(path));
  if (doc.contains("model")) return ModelFromJson(doc["model"]);
  return ModelFromJson(doc);
}

}  // namespace optverifier::testing
