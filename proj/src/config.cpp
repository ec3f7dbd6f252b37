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

#include "optverifier/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace optverifier {

namespace {

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void Bad(const std::string& key, const std::string& value, const char* want) {
  throw Error(ErrorCode::kConfigError,
              "config key " + key + ": expected " + want + ", got \"" + value + "\"");
}

std::int64_t ToInt(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) Bad(key, v, "an integer");
  return out;
}

int ToCount(const std::string& key, const std::string& v) {
  std::int64_t n = ToInt(key, v);
  if (n < 0 || n > 1'000'000) Bad(key, v, "a non-negative integer");
  return static_cast<int>(n);
}

double ToDouble(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) Bad(key, v, "a number");
    return d;
  } catch (const std::logic_error&) {
    Bad(key, v, "a number");
  }
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  Bad(key, v, "a boolean");
}

std::vector<std::string> Words(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, sep)) {
    std::string t = Trim(cur);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace

ConfigValues ParseConfigText(std::string_view text) {
  ConfigValues out;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfigError,
                  "config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = Trim(t.substr(0, eq));
    std::string value = Trim(t.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::kConfigError, "config line " + std::to_string(lineno) + ": empty key");
    }
    if (!out.emplace(key, value).second) {
      throw Error(ErrorCode::kConfigError,
                  "config line " + std::to_string(lineno) + ": duplicate key " + key);
    }
  }
  return out;
}

ConfigValues LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfigText(buf.str());
}

const std::vector<std::pair<std::string, std::string>>& ConfigKeys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"max_structure_rounds", "structure-side refinements allowed (default 2)"},
      {"max_solution_rounds", "solution-side refinements allowed (default 2)"},
      {"max_total_refinements", "refinements allowed per run (default 6)"},
      {"max_compile_retries", "refinements after compile errors (default 2)"},
      {"strict_reverify", "repeat structure verification after solution refinements"},
      {"prompt_set", "dsl (default) or latex"},
      {"prompt_dir", "directory with replacement prompt templates"},
      {"toy_instantiation", "ground external-parameter models on synthetic data"},
      {"toy_seed", "seed for synthetic data"},
      {"toy_dims", "dimension overrides, e.g. Warehouses=10,Customers=20"},
      {"data_path", "CSV or JSON file with external parameter values"},
      {"solver", "auto (default), external or brute_force"},
      {"solver_command", "external solver executable"},
      {"solver_args", "space-separated arguments; {lp} and {sol} are substituted"},
      {"solver_format", "generic_json (default) or cbc_sol"},
      {"solver_id", "name recorded with solutions"},
      {"solve_timeout_seconds", "external solver timeout (default 60)"},
      {"brute_force_cap", "largest enumeration the built-in solver accepts"},
      {"auto_enumeration_cap", "largest enumeration auto mode prefers over the external solver"},
      {"base_url", "chat-completions endpoint base URL"},
      {"model_name", "chat model name"},
      {"temperature", "sampling temperature"},
      {"seed", "sampling seed sent to the provider"},
      {"max_retries", "retries after transport errors (default 3)"},
      {"request_timeout_seconds", "HTTP timeout per request"},
      {"jobs", "parallel runs in bench (default 1)"},
      {"tol_abs", "absolute tolerance for solving accuracy (default 1e-6)"},
      {"tol_rel", "relative tolerance for solving accuracy (default 1e-4)"},
      {"perturb_k", "negatives per positive in the verifier study (default 9)"},
      {"perturb_seed", "seed for perturbations (default 7)"},
      {"perturb_ops", "comma-separated perturbation operators (default all)"},
  };
  return keys;
}

void ApplyConfig(const ConfigValues& values, Settings& s) {
  for (const auto& [key, v] : values) {
    PipelineConfig& p = s.pipeline;
    if (key == "max_structure_rounds") {
      p.max_structure_rounds = ToCount(key, v);
    } else if (key == "max_solution_rounds") {
      p.max_solution_rounds = ToCount(key, v);
    } else if (key == "max_total_refinements") {
      p.max_total_refinements = ToCount(key, v);
    } else if (key == "max_compile_retries") {
      p.max_compile_retries = ToCount(key, v);
    } else if (key == "strict_reverify") {
      p.strict_reverify = ToBool(key, v);
    } else if (key == "prompt_set") {
      auto id = ParsePromptSet(v);
      if (!id) Bad(key, v, "dsl or latex");
      s.agents.prompt_set = *id;
    } else if (key == "prompt_dir") {
      s.agents.prompt_dir = v;
    } else if (key == "toy_instantiation") {
      p.toy_instantiation = ToBool(key, v);
    } else if (key == "toy_seed") {
      p.toy_seed = static_cast<std::uint64_t>(ToInt(key, v));
    } else if (key == "toy_dims") {
      p.toy_dims.clear();
      for (const auto& item : Words(v, ',')) {
        size_t eq = item.find('=');
        if (eq == std::string::npos) Bad(key, v, "Name=N pairs");
        p.toy_dims[Trim(item.substr(0, eq))] = ToInt(key, Trim(item.substr(eq + 1)));
      }
    } else if (key == "data_path") {
      p.data_path = v;
    } else if (key == "solver") {
      if (v == "auto") p.solver.backend = SolverBackend::kAuto;
      else if (v == "external") p.solver.backend = SolverBackend::kExternal;
      else if (v == "brute_force") p.solver.backend = SolverBackend::kBruteForce;
      else Bad(key, v, "auto, external or brute_force");
    } else if (key == "solver_command") {
      p.solver.external.command = v;
    } else if (key == "solver_args") {
      p.solver.external.args = Words(v, ' ');
    } else if (key == "solver_format") {
      if (v == "generic_json") p.solver.external.format = SolutionFormat::kGenericJson;
      else if (v == "cbc_sol") p.solver.external.format = SolutionFormat::kCbcSol;
      else Bad(key, v, "generic_json or cbc_sol");
    } else if (key == "solver_id") {
      p.solver.external.solver_id = v;
    } else if (key == "solve_timeout_seconds") {
      p.solver.external.timeout_seconds = ToDouble(key, v);
    } else if (key == "brute_force_cap") {
      p.solver.brute_force_cap = ToDouble(key, v);
    } else if (key == "auto_enumeration_cap") {
      p.solver.auto_enumeration_cap = ToDouble(key, v);
    } else if (key == "base_url") {
      s.live.base_url = v;
    } else if (key == "model_name") {
      s.gateway.model_name = v;
    } else if (key == "temperature") {
      s.gateway.temperature = ToDouble(key, v);
    } else if (key == "seed") {
      s.gateway.seed = ToInt(key, v);
    } else if (key == "max_retries") {
      s.gateway.max_retries = ToCount(key, v);
    } else if (key == "request_timeout_seconds") {
      s.live.timeout_seconds = ToDouble(key, v);
    } else if (key == "jobs") {
      s.jobs = std::max(1, ToCount(key, v));
    } else if (key == "tol_abs") {
      s.tol_abs = ToDouble(key, v);
    } else if (key == "tol_rel") {
      s.tol_rel = ToDouble(key, v);
    } else if (key == "perturb_k") {
      s.perturb_k = ToCount(key, v);
    } else if (key == "perturb_seed") {
      s.perturb_seed = static_cast<std::uint64_t>(ToInt(key, v));
    } else if (key == "perturb_ops") {
      s.perturb_ops = Words(v, ',');
    } else {
      throw Error(ErrorCode::kConfigError, "unknown config key " + key);
    }
  }
  s.pipeline.Check();
}

}  // namespace optverifier
