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

#include "optverifier/structure.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace optverifier {

namespace {

NamedEntries ParseEntries(const Json& doc, const char* key) {
  NamedEntries out;
  if (!doc.contains(key) || doc.at(key).is_null()) return out;
  const Json& v = doc.at(key);
  auto to_text = [](const Json& j) {
    return j.is_string() ? j.get<std::string>() : j.dump();
  };
  std::set<std::string> seen;
  auto add = [&](std::string name, std::string desc) {
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kSchemaError,
                  "duplicate key \"" + name + "\" in \"" + key + "\"");
    }
    out.emplace_back(std::move(name), std::move(desc));
  };
  if (v.is_object()) {
    for (const auto& [name, desc] : v.items()) add(name, to_text(desc));
  } else if (v.is_array()) {
    for (const auto& item : v) add(to_text(item), "");
  } else {
    throw Error(ErrorCode::kSchemaError,
                "\"" + std::string(key) + "\" must be an object");
  }
  return out;
}

std::string RequiredText(const Json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw Error(ErrorCode::kSchemaError,
                "missing required key \"" + std::string(key) + "\" at $");
  }
  const Json& v = doc.at(key);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw Error(ErrorCode::kSchemaError,
                "\"" + std::string(key) + "\" must be a non-empty string");
  }
  return v.get<std::string>();
}

}  // namespace

ModelingStructure StructureFromJson(const Json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kSchemaError, "structure must be a JSON object");
  }
  ModelingStructure s;
  s.problem_type = RequiredText(doc, "problem_type");
  s.specific_type = RequiredText(doc, "specific_type");
  s.subdivisions = ParseEntries(doc, "subdivisions");
  s.implicit_constraints = ParseEntries(doc, "implicit_constraints");
  if (doc.contains("provenance") &&
      doc.at("provenance") == "interpreted_from_model") {
    s.provenance = ModelingStructure::Origin::kInterpretedFromModel;
  }
  return s;
}

ModelingStructure ParseStructure(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text.begin(), json_text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, e.what());
  }
  return StructureFromJson(doc);
}

Json StructureToJson(const ModelingStructure& s) {
  Json doc;
  doc["problem_type"] = s.problem_type;
  doc["specific_type"] = s.specific_type;
  doc["subdivisions"] = Json::object();
  for (const auto& [k, v] : s.subdivisions) doc["subdivisions"][k] = v;
  doc["implicit_constraints"] = Json::object();
  for (const auto& [k, v] : s.implicit_constraints) doc["implicit_constraints"][k] = v;
  return doc;
}

std::string SerializeStructure(const ModelingStructure& s) {
  return StructureToJson(s).dump(2);
}

std::vector<std::string> NameTokens(std::string_view name) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

double TokenJaccard(std::string_view a, std::string_view b) {
  auto ta = NameTokens(a);
  auto tb = NameTokens(b);
  if (ta.empty() && tb.empty()) return 1.0;
  std::vector<std::string> common;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(),
                        std::back_inserter(common));
  size_t uni = ta.size() + tb.size() - common.size();
  return static_cast<double>(common.size()) / static_cast<double>(uni);
}

StructureDiff DiffStructures(const ModelingStructure& reference,
                             const ModelingStructure& candidate) {
  StructureDiff diff;
  const auto& ref = reference.implicit_constraints;
  const auto& cand = candidate.implicit_constraints;

  struct Pair {
    double score;
    size_t r;
    size_t c;
  };
  std::vector<Pair> pairs;
  for (size_t r = 0; r < ref.size(); ++r) {
    for (size_t c = 0; c < cand.size(); ++c) {
      double s = TokenJaccard(ref[r].first, cand[c].first);
      if (s >= kNameMatchThreshold) pairs.push_back({s, r, c});
    }
  }
  // Best scores first; ties resolved in declaration order.
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.score > b.score; });
  std::vector<bool> ref_used(ref.size()), cand_used(cand.size());
  size_t matched = 0;
  for (const auto& p : pairs) {
    if (ref_used[p.r] || cand_used[p.c]) continue;
    ref_used[p.r] = cand_used[p.c] = true;
    ++matched;
  }
  for (size_t r = 0; r < ref.size(); ++r) {
    if (!ref_used[r]) diff.missing_low_level.push_back(ref[r].first);
  }
  for (size_t c = 0; c < cand.size(); ++c) {
    if (!cand_used[c]) diff.extra_low_level.push_back(cand[c].first);
  }
  if (TokenJaccard(reference.problem_type, candidate.problem_type) <
      kNameMatchThreshold) {
    diff.level_mismatch.push_back(
        {"high", reference.problem_type, candidate.problem_type});
  }
  if (TokenJaccard(reference.specific_type, candidate.specific_type) <
      kNameMatchThreshold) {
    diff.level_mismatch.push_back(
        {"medium", reference.specific_type, candidate.specific_type});
  }
  size_t denom = std::max(ref.size(), cand.size());
  diff.similarity = denom == 0 ? 1.0
                               : static_cast<double>(matched) /
                                     static_cast<double>(denom);
  if (!diff.level_mismatch.empty()) {
    diff.similarity = std::min(diff.similarity, 0.5);
  }
  return diff;
}

std::string StructureDiff::Render() const {
  std::ostringstream out;
  out << "Structure similarity " << similarity << ".";
  for (const auto& m : level_mismatch) {
    out << "\n- " << m.level << "-level mismatch: expected \"" << m.reference
        << "\", model reads as \"" << m.candidate << "\"";
  }
  for (const auto& name : missing_low_level) {
    out << "\n- missing from the model: " << name;
  }
  for (const auto& name : extra_low_level) {
    out << "\n- not in the reference structure: " << name;
  }
  return out.str();
}

}  // namespace optverifier
