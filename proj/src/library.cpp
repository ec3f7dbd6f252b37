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

#include "optverifier/library.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "optverifier/embedded_files.inc"

namespace optverifier {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

NamedEntries EntriesFromJson(const Json& j) {
  NamedEntries out;
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      out.emplace_back(it.key(), it.value().is_string() ? it.value().get<std::string>()
                                                        : it.value().dump());
    }
  }
  return out;
}

std::set<std::string> DeclaredSymbols(const OptimizationModel& m) {
  std::set<std::string> s;
  for (const auto& p : m.parameters) s.insert(p.symbol);
  for (const auto& v : m.variables) s.insert(v.symbol);
  return s;
}

}  // namespace

ProblemInstance LibraryEntry::Instance() const {
  ProblemInstance p;
  p.id = name;
  p.description = description;
  p.ground_truth_objective = ground_truth_objective;
  return p;
}

LibraryEntry LibraryEntryFromJson(const Json& doc) {
  LibraryEntry e;
  try {
    e.name = doc.at("name").get<std::string>();
    if (doc.contains("keywords")) {
      for (const auto& k : doc["keywords"]) e.keywords.push_back(Lower(k.get<std::string>()));
    }
    e.problem_type = doc.at("problem_type").get<std::string>();
    e.specific_type = doc.at("specific_type").get<std::string>();
    if (doc.contains("subdivisions")) e.subdivisions = EntriesFromJson(doc["subdivisions"]);
    e.description = doc.value("description", "");
    if (doc.contains("ground_truth_objective") && doc["ground_truth_objective"].is_number()) {
      e.ground_truth_objective = doc["ground_truth_objective"].get<double>();
    }
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::kSchemaError, std::string("library entry: ") + ex.what());
  }
  if (!doc.contains("model")) throw Error(ErrorCode::kSchemaError, "library entry lacks 'model'");
  e.model = ModelFromJson(doc["model"]);
  if (doc.contains("initial_model")) e.initial_model = ModelFromJson(doc["initial_model"]);
  return e;
}

ModelLibrary::ModelLibrary(std::vector<LibraryEntry> entries) : entries_(std::move(entries)) {}

const ModelLibrary& ModelLibrary::Builtin() {
  static const ModelLibrary lib = [] {
    std::vector<LibraryEntry> entries;
    const std::string_view prefix = "data/library/";
    for (const auto& f : embedded::kEmbeddedFiles) {
      if (f.path.substr(0, prefix.size()) != prefix) continue;
      try {
        entries.push_back(LibraryEntryFromJson(Json::parse(f.text)));
      } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::kMalformedJson, std::string(f.path) + ": " + e.what());
      }
    }
    return ModelLibrary(std::move(entries));
  }();
  return lib;
}

ModelLibrary ModelLibrary::FromDirectory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& de : std::filesystem::directory_iterator(dir)) {
    if (de.path().extension() == ".json") files.push_back(de.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LibraryEntry> entries;
  for (const auto& p : files) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      entries.push_back(LibraryEntryFromJson(Json::parse(ss.str())));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kMalformedJson, p.string() + ": " + e.what());
    }
  }
  return ModelLibrary(std::move(entries));
}

const LibraryEntry* ModelLibrary::Find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const LibraryEntry& ModelLibrary::Get(std::string_view name) const {
  const LibraryEntry* e = Find(name);
  if (!e) throw Error(ErrorCode::kPrecondition, "no library entry '" + std::string(name) + "'");
  return *e;
}

const LibraryEntry* ModelLibrary::MatchDescription(std::string_view text) const {
  std::string l = Lower(text);
  const LibraryEntry* best = nullptr;
  size_t best_hits = 0;
  for (const auto& e : entries_) {
    size_t hits = 0;
    for (const auto& k : e.keywords) {
      for (size_t pos = l.find(k); pos != std::string::npos; pos = l.find(k, pos + k.size())) {
        ++hits;
      }
    }
    if (hits > best_hits) {
      best_hits = hits;
      best = &e;
    }
  }
  return best;
}

const LibraryEntry* ModelLibrary::MatchModel(const OptimizationModel& model) const {
  auto mine = DeclaredSymbols(model);
  const LibraryEntry* best = nullptr;
  double best_score = 0.0;
  for (const auto& e : entries_) {
    auto theirs = DeclaredSymbols(e.model);
    size_t common = 0;
    for (const auto& s : mine) common += theirs.count(s);
    size_t uni = mine.size() + theirs.size() - common;
    double score = uni ? static_cast<double>(common) / static_cast<double>(uni) : 0.0;
    if (score >= kModelMatchThreshold && score > best_score) {
      best_score = score;
      best = &e;
    }
  }
  return best;
}

NamedEntries ModelRequirements(const OptimizationModel& model) {
  NamedEntries out;
  for (const auto& c : model.constraints) out.emplace_back(c.name, c.description);
  for (const auto& v : model.variables) out.emplace_back("Variable " + v.symbol, v.definition);
  return out;
}

ModelingStructure StructureFromModel(const OptimizationModel& model, std::string problem_type,
                                     std::string specific_type) {
  ModelingStructure s;
  s.problem_type = std::move(problem_type);
  s.specific_type = std::move(specific_type);
  s.implicit_constraints = ModelRequirements(model);
  s.provenance = ModelingStructure::Origin::kInterpretedFromModel;
  return s;
}

ModelingStructure ReferenceStructure(const LibraryEntry& entry) {
  ModelingStructure s;
  s.problem_type = entry.problem_type;
  s.specific_type = entry.specific_type;
  s.subdivisions = entry.subdivisions;
  s.implicit_constraints = ModelRequirements(entry.model);
  s.provenance = ModelingStructure::Origin::kDistilledFromDescription;
  return s;
}

}  // namespace optverifier
