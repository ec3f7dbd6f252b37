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

// Command-line entry point. Exit codes: 0 success (run accepted), 1 run
// ended without acceptance or model invalid, 2 configuration or input
// error, 3 pipeline or solver failure.

#include <CLI/CLI.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "optverifier/bench.hpp"
#include "optverifier/config.hpp"

namespace ov = optverifier;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotAccepted = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFailed = 3;

struct ConfigExit {
  std::string message;
};

struct Globals {
  std::string config_path;
  std::string cassette;
  bool mock_agents = false;
  bool simulate = false;
  std::string solver;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigExit{"cannot read " + path};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigExit{"cannot write " + path.string()};
  out << text;
}

ov::Settings LoadSettings(const Globals& g) {
  ov::Settings s;
  try {
    if (!g.config_path.empty()) ov::ApplyConfig(ov::LoadConfigFile(g.config_path), s);
    if (!g.solver.empty()) ov::ApplyConfig({{"solver", g.solver}}, s);
  } catch (const ov::Error& e) {
    throw ConfigExit{e.what()};
  }
  if (g.seed) {
    s.pipeline.toy_seed = *g.seed;
    s.perturb_seed = *g.seed;
  }
  if (g.jobs) s.jobs = std::max(1, *g.jobs);
  return s;
}

// Builds per-run agent suites for the chosen mode: rule-based mocks, replay
// of a cassette, simulated chat, or a live endpoint. With `record` set the
// chat backend is wrapped to append to the cassette.
ov::AgentFactory MakeAgentFactory(const Globals& g, const ov::Settings& s, bool record) {
  if (g.mock_agents) {
    return [] { return std::make_unique<ov::MockAgents>(); };
  }
  std::shared_ptr<ov::ChatBackend> backend;
  if (g.simulate) {
    backend = std::make_shared<ov::SimulatedBackend>();
  } else if (!g.cassette.empty() && !record) {
    try {
      backend = std::make_shared<ov::ReplayBackend>(ov::Cassette::Load(g.cassette));
    } catch (const ov::Error& e) {
      throw ConfigExit{e.what()};
    }
  } else {
    ov::LiveConfig live = s.live;
    if (const char* key = std::getenv("OPTVERIFIER_API_KEY")) live.api_key = key;
    backend = std::make_shared<ov::LiveBackend>(live);
  }
  if (record) {
    if (g.cassette.empty()) throw ConfigExit{"record needs --cassette"};
    backend = std::make_shared<ov::RecordingBackend>(backend, g.cassette, s.gateway.model_name);
  }
  auto gateway = std::make_shared<const ov::Gateway>(backend, s.gateway);
  ov::LlmAgentOptions options = s.agents;
  return [gateway, options] { return std::make_unique<ov::LlmAgents>(gateway, options); };
}

ov::OptimizationModel ReadModel(const std::string& path) {
  std::string text = ReadFile(path);
  try {
    ov::Json doc = ov::Json::parse(text);
    // Library entries wrap the model.
    if (doc.is_object() && doc.contains("model") && !doc.contains("variables")) {
      return ov::ModelFromJson(doc.at("model"));
    }
    return ov::ModelFromJson(doc);
  } catch (const ov::Json::parse_error& e) {
    throw ConfigExit{path + ": " + e.what()};
  } catch (const ov::Error& e) {
    throw ConfigExit{path + ": " + e.what()};
  }
}

bool IsDataset(const std::string& path) {
  return std::filesystem::path(path).extension() == ".jsonl";
}

int RunOne(const Globals& g, const std::string& input, const std::string& model_path,
           bool record) {
  ov::Settings s = LoadSettings(g);
  ov::ProblemInstance d;
  d.id = std::filesystem::path(input).stem().string();
  d.description = ReadFile(input);
  std::optional<ov::OptimizationModel> m0;
  if (!model_path.empty()) {
    m0 = ReadModel(model_path);
    if (auto report = ov::ValidateModel(*m0); !report.valid()) {
      throw ConfigExit{"supplied model is invalid:\n" + report.Render()};
    }
  }
  auto agents = MakeAgentFactory(g, s, record)();
  ov::RunRecord record_out = m0 ? ov::VerifyAndRefine(d, *m0, *agents, s.pipeline)
                                : ov::RunPipeline(d, *agents, s.pipeline);
  std::cout << ov::RenderRunReport(record_out);
  if (!g.out.empty()) WriteFile(g.out, ov::RunRecordToJson(record_out).dump(2) + "\n");
  switch (record_out.outcome) {
    case ov::Outcome::kAccepted: return kExitOk;
    case ov::Outcome::kBudgetExhausted: return kExitNotAccepted;
    case ov::Outcome::kFailed:
      std::cerr << "run failed: " << record_out.error_code << ": " << record_out.error << "\n";
      return kExitFailed;
  }
  return kExitFailed;
}

int Bench(const Globals& g, const std::string& dataset, bool record) {
  ov::Settings s = LoadSettings(g);
  std::vector<ov::ProblemInstance> instances;
  try {
    instances = ov::LoadDataset(dataset);
  } catch (const ov::Error& e) {
    throw ConfigExit{e.what()};
  }
  auto factory = MakeAgentFactory(g, s, record);
  std::vector<ov::RunRecord> records = ov::RunBench(instances, factory, s.pipeline, s.jobs);
  std::vector<ov::BenchResult> results;
  std::vector<std::string> datasets;
  for (size_t i = 0; i < instances.size(); ++i) {
    results.push_back(ov::MakeBenchResult(instances[i], records[i]));
    datasets.push_back(results.back().dataset);
  }
  ov::BenchReport report = ov::ScoreSolvingAccuracy(results, s.tol_rel, s.tol_abs);
  std::filesystem::path out = g.out.empty() ? "bench_out" : g.out;
  WriteFile(out / "bench_report.json", report.ToJson(false).dump(2) + "\n");
  std::string md = report.ToMarkdown() + "\n## Efficiency\n\n" +
                   ov::EfficiencyTable(records, datasets);
  WriteFile(out / "bench_report.md", md);
  std::string lines;
  for (const auto& r : records) lines += ov::RunRecordToJson(r).dump() + "\n";
  WriteFile(out / "records.jsonl", lines);
  std::cout << "Instances: " << instances.size() << "\n";
  std::cout << "Solving accuracy: "
            << (report.micro_sa ? ov::FormatNumber12(*report.micro_sa) : std::string("n/a"))
            << "\n";
  std::cout << "Report written to " << out.string() << "\n";
  return kExitOk;
}

int VerifyBench(const Globals& g, const std::string& dir, int synthetic) {
  ov::Settings s = LoadSettings(g);
  std::vector<ov::StudyPositive> positives;
  if (synthetic > 0) positives = ov::SyntheticPositives(synthetic, s.perturb_seed);
  if (!dir.empty()) {
    if (!std::filesystem::is_directory(dir)) throw ConfigExit{dir + " is not a directory"};
    std::vector<std::filesystem::path> files;
    for (const auto& f : std::filesystem::recursive_directory_iterator(dir)) {
      if (f.is_regular_file() && f.path().extension() == ".json") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::string difficulty = f.parent_path() == std::filesystem::path(dir)
                                   ? "all"
                                   : f.parent_path().filename().string();
      try {
        ov::LibraryEntry entry = ov::LibraryEntryFromJson(ov::Json::parse(ReadFile(f.string())));
        positives.push_back(ov::PositiveFromEntry(entry, difficulty));
      } catch (const std::exception& e) {
        throw ConfigExit{f.string() + ": " + e.what()};
      }
    }
  }
  if (positives.empty()) throw ConfigExit{"no positive models found"};

  ov::StudyOptions options;
  options.spec.k = s.perturb_k;
  options.spec.seed = s.perturb_seed;
  if (!s.perturb_ops.empty()) {
    options.spec.ops.clear();
    for (const auto& name : s.perturb_ops) {
      auto op = ov::ParsePerturbOp(name);
      if (!op) throw ConfigExit{"unknown perturbation op " + name};
      options.spec.ops.push_back(*op);
    }
  }
  options.solver = s.pipeline.solver;
  options.tolerances = s.pipeline.tolerances;

  ov::ModelLibrary library = ov::LibraryFromPositives(positives);
  std::unique_ptr<ov::AgentSuite> agents;
  if (g.mock_agents) {
    agents = std::make_unique<ov::MockAgents>(library);
  } else {
    agents = MakeAgentFactory(g, s, false)();
  }
  ov::StudyReport report;
  try {
    report = ov::VerifierStudy(positives, *agents, options);
  } catch (const ov::Error& e) {
    std::cerr << ov::ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return kExitFailed;
  }
  std::cout << report.ToMarkdown();
  std::filesystem::path out = g.out.empty() ? "verify_out" : g.out;
  WriteFile(out / "verifier_study.json", report.ToJson().dump(2) + "\n");
  WriteFile(out / "verifier_study.md", report.ToMarkdown());
  return kExitOk;
}

int SolveCmd(const Globals& g, const std::string& model_path, const std::string& data,
             bool toy, const std::string& lp_out) {
  ov::Settings s = LoadSettings(g);
  ov::OptimizationModel m = ReadModel(model_path);
  if (auto report = ov::ValidateModel(m); !report.valid()) {
    std::cerr << report.Render() << "\n";
    return kExitNotAccepted;
  }
  try {
    ov::OptimizationModel target = m;
    ov::Bindings bindings;
    if (toy) {
      ov::ToyInstance inst = ov::InstantiateToy(m, s.pipeline.toy_seed, s.pipeline.toy_dims);
      target = inst.model;
      bindings = inst.bindings;
    } else if (!data.empty()) {
      bindings = ov::LoadExternalParameters(m, data);
      target = ov::BindModel(m, bindings);
    }
    ov::GroundedModel grounded = ov::Ground(target, bindings);
    for (const auto& w : grounded.warnings) std::cerr << "warning: " << w << "\n";
    if (!lp_out.empty()) WriteFile(lp_out, ov::EmitLp(grounded));
    ov::Solution x = ov::Solve(grounded, s.pipeline.solver);
    ov::Json doc = ov::SolutionToJson(x);
    if (x.status == ov::SolveStatus::kOptimal || x.status == ov::SolveStatus::kFeasible) {
      ov::FeasibilityReport fr =
          ov::CheckFeasibility(grounded, x.assignment, s.pipeline.tolerances);
      doc["feasible"] = fr.feasible;
    }
    std::cout << doc.dump(2) << "\n";
    if (!g.out.empty()) WriteFile(g.out, doc.dump(2) + "\n");
    if (x.status == ov::SolveStatus::kError) return kExitFailed;
    return x.status == ov::SolveStatus::kOptimal || x.status == ov::SolveStatus::kFeasible
               ? kExitOk
               : kExitNotAccepted;
  } catch (const ov::Error& e) {
    std::cerr << ov::ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return kExitFailed;
  }
}

int Lint(const std::string& model_path) {
  std::string text = ReadFile(model_path);
  std::vector<std::string> warnings;
  ov::OptimizationModel m;
  try {
    ov::Json doc = ov::Json::parse(text);
    if (doc.is_object() && doc.contains("model") && !doc.contains("variables")) {
      doc = doc.at("model");
    }
    m = ov::ModelFromJson(doc, &warnings);
  } catch (const std::exception& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return kExitNotAccepted;
  }
  ov::ValidationReport report = ov::ValidateModel(m);
  for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  if (!report.valid()) {
    std::cout << report.Render() << "\n";
    return kExitNotAccepted;
  }
  std::cout << "ok: " << m.parameters.size() << " parameters, " << m.variables.size()
            << " variables, " << m.constraints.size() << " constraints\n";
  return kExitOk;
}

int CassetteList(const std::string& path) {
  ov::Cassette c;
  try {
    c = ov::Cassette::Load(path);
  } catch (const ov::Error& e) {
    throw ConfigExit{e.what()};
  }
  std::cout << "entries: " << c.size() << "\n";
  if (!c.metadata().empty()) std::cout << "meta: " << c.metadata().dump() << "\n";
  for (const auto& e : c.entries()) {
    std::string preview = e.response.content.substr(0, 60);
    for (char& ch : preview) {
      if (ch == '\n') ch = ' ';
    }
    std::cout << e.fingerprint.substr(0, 16) << "  " << preview << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-side verification of optimization models built from problem descriptions"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "flat key = value config file");
  app.add_option("--cassette", g.cassette, "chat cassette to replay (or record into)");
  app.add_flag("--mock-agents", g.mock_agents, "use the rule-based agents");
  app.add_flag("--simulate", g.simulate, "answer chat turns with the built-in simulated model");
  app.add_option("--solver", g.solver, "auto, external or brute_force");
  app.add_option("--seed", g.seed, "seed for toy data and perturbations");
  app.add_option("--jobs", g.jobs, "parallel runs");
  app.add_option("--out", g.out, "output file (run, solve) or directory (bench, verify-bench)");

  std::string input, model, data, lp, dir;
  bool toy = false;
  int synthetic = 0;

  auto* run = app.add_subcommand("run", "run the pipeline on one description file");
  run->add_option("description", input, "problem description text file")->required();
  run->add_option("--model", model, "verify this model instead of formulating one");

  auto* bench = app.add_subcommand("bench", "run a JSONL dataset and score solving accuracy");
  bench->add_option("dataset", input)->required();

  auto* verify = app.add_subcommand("verify-bench", "verifier precision/recall study");
  verify->add_option("models_dir", dir, "directory of reference model files");
  verify->add_option("--synthetic", synthetic, "add N synthetic positives per difficulty");

  auto* rec = app.add_subcommand("record", "run (or bench) while recording chat replies");
  rec->add_option("input", input, "description file or .jsonl dataset")->required();
  auto* rep = app.add_subcommand("replay", "run (or bench) against a recorded cassette");
  rep->add_option("input", input, "description file or .jsonl dataset")->required();

  auto* solve = app.add_subcommand("solve", "ground and solve a model file");
  solve->add_option("model", model)->required();
  solve->add_option("--data", data, "external parameter data (CSV or JSON)");
  solve->add_flag("--toy", toy, "use synthetic data for external parameters");
  solve->add_option("--lp", lp, "also write the LP file here");

  auto* lint = app.add_subcommand("lint", "validate a model file");
  lint->add_option("model", model)->required();

  auto* cassette = app.add_subcommand("cassette", "cassette utilities");
  cassette->require_subcommand(1);
  auto* list = cassette->add_subcommand("list", "print entry count and previews");
  list->add_option("file", input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return RunOne(g, input, model, false);
    if (*bench) return Bench(g, input, false);
    if (*verify) {
      if (dir.empty() && synthetic <= 0) throw ConfigExit{"give a models directory or --synthetic N"};
      return VerifyBench(g, dir, synthetic);
    }
    if (*rec || *rep) {
      bool recording = rec->parsed();
      if (g.cassette.empty()) throw ConfigExit{"--cassette is required"};
      if (!recording && !std::filesystem::exists(g.cassette)) {
        throw ConfigExit{"cassette " + g.cassette + " does not exist"};
      }
      return IsDataset(input) ? Bench(g, input, recording) : RunOne(g, input, "", recording);
    }
    if (*solve) return SolveCmd(g, model, data, toy, lp);
    if (*lint) return Lint(model);
    if (*list) return CassetteList(input);
  } catch (const ConfigExit& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitConfig;
  } catch (const ov::Error& e) {
    std::cerr << "error: " << ov::ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitConfig;
}
