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

#include "optverifier/solve.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

namespace optverifier {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Implied-bound tightening for pure-integer models. Returns false when a
// domain becomes empty.
bool TightenBounds(const GroundedModel& g, std::vector<double>& lo, std::vector<double>& hi) {
  for (size_t i = 0; i < lo.size(); ++i) {
    lo[i] = std::ceil(lo[i] - 1e-9);
    hi[i] = std::floor(hi[i] + 1e-9);
    if (lo[i] > hi[i]) return false;
  }
  auto tighten_le = [&](const LinearTerms& a, double sign, double b, bool& changed) {
    // sum(sign * a_j x_j) <= sign * b
    double finite = 0.0;
    int infinite = 0;
    std::vector<double> contrib;
    contrib.reserve(a.size());
    for (const auto& [j, coef] : a) {
      double c = sign * coef;
      double m = c > 0 ? c * lo[j] : c * hi[j];
      if (std::isinf(m) || std::isnan(m)) {
        ++infinite;
        contrib.push_back(-kInfinity);
      } else {
        finite += m;
        contrib.push_back(m);
      }
    }
    size_t n = 0;
    for (const auto& [j, coef] : a) {
      double c = sign * coef;
      double m = contrib[n++];
      double others;
      if (infinite == 0) {
        others = finite - m;
      } else if (infinite == 1 && std::isinf(m)) {
        others = finite;
      } else {
        continue;
      }
      double limit = (sign * b - others) / c;
      if (c > 0) {
        double nh = std::floor(limit + 1e-9);
        if (nh < hi[j]) {
          hi[j] = nh;
          changed = true;
        }
      } else {
        double nl = std::ceil(limit - 1e-9);
        if (nl > lo[j]) {
          lo[j] = nl;
          changed = true;
        }
      }
    }
  };
  for (int pass = 0; pass < 64; ++pass) {
    bool changed = false;
    for (const auto& r : g.rows) {
      if (r.relop != Relop::kGe) tighten_le(r.coefs, 1.0, r.rhs, changed);
      if (r.relop != Relop::kLe) tighten_le(r.coefs, -1.0, r.rhs, changed);
    }
    for (size_t i = 0; i < lo.size(); ++i) {
      if (lo[i] > hi[i]) return false;
    }
    if (!changed) break;
  }
  return true;
}

struct Domains {
  bool empty = false;
  std::vector<double> lo, hi;
  double points = 1.0;
};

Domains PrepareDomains(const GroundedModel& g, double cap) {
  Domains d;
  for (const auto& v : g.variables) {
    if (v.type == VarType::kContinuous) {
      throw Error(ErrorCode::kOracleInapplicable,
                  "variable '" + v.name + "' is continuous; enumeration needs integers");
    }
    d.lo.push_back(v.lower);
    d.hi.push_back(v.upper);
  }
  if (!TightenBounds(g, d.lo, d.hi)) {
    d.empty = true;
    return d;
  }
  for (size_t i = 0; i < d.lo.size(); ++i) {
    if (std::isinf(d.lo[i]) || std::isinf(d.hi[i])) {
      throw Error(ErrorCode::kOracleInapplicable,
                  "variable '" + g.variables[i].name + "' has an unbounded domain");
    }
    d.points *= d.hi[i] - d.lo[i] + 1.0;
  }
  if (d.points > cap) {
    throw Error(ErrorCode::kOracleInapplicable,
                "search space of " + FormatNumber12(d.points) + " points exceeds cap " +
                    FormatNumber12(cap));
  }
  return d;
}

bool RowHolds(const LinearRow& r, double lhs) {
  double tol = 1e-9 * std::max(1.0, std::fabs(r.rhs));
  switch (r.relop) {
    case Relop::kLe: return lhs <= r.rhs + tol;
    case Relop::kGe: return lhs >= r.rhs - tol;
    case Relop::kEq: return std::fabs(lhs - r.rhs) <= tol;
  }
  return false;
}

std::string NameOf(const GroundedModel& g, size_t i) { return g.variables[i].name; }

}  // namespace

std::string_view SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kError: return "error";
  }
  return "error";
}

std::optional<SolveStatus> ParseSolveStatus(std::string_view text) {
  for (auto s : {SolveStatus::kOptimal, SolveStatus::kFeasible, SolveStatus::kInfeasible,
                 SolveStatus::kUnbounded, SolveStatus::kError}) {
    if (SolveStatusName(s) == text) return s;
  }
  return std::nullopt;
}

bool BruteForceApplicable(const GroundedModel& g, double cap) {
  try {
    PrepareDomains(g, cap);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Solution BruteForceSolve(const GroundedModel& g, double cap) {
  auto start = Clock::now();
  Solution sol;
  sol.solver_id = "brute_force";
  Domains d = PrepareDomains(g, cap);
  if (d.empty) {
    sol.status = SolveStatus::kInfeasible;
    sol.message = "bound propagation emptied a domain";
    sol.wall_time_seconds = Seconds(start);
    return sol;
  }
  const size_t n = g.variables.size();
  std::vector<std::vector<std::pair<size_t, double>>> cols(n);
  for (size_t r = 0; r < g.rows.size(); ++r) {
    for (const auto& [j, c] : g.rows[r].coefs) cols[j].emplace_back(r, c);
  }
  std::vector<double> x = d.lo;
  std::vector<double> lhs(g.rows.size());
  double obj = 0.0;
  auto recompute = [&]() {
    for (size_t r = 0; r < g.rows.size(); ++r) lhs[r] = g.Evaluate(g.rows[r].coefs, x);
    obj = g.Evaluate(g.objective.coefs, x);
  };
  auto shift = [&](size_t j, double delta) {
    x[j] += delta;
    for (const auto& [r, c] : cols[j]) lhs[r] += c * delta;
    auto it = g.objective.coefs.find(j);
    if (it != g.objective.coefs.end()) obj += it->second * delta;
  };
  const bool maximize = g.objective.sense == ObjectiveSense::kMaximize;
  bool found = false;
  double best = 0.0;
  std::vector<double> best_x;
  recompute();
  while (true) {
    bool ok = true;
    for (size_t r = 0; r < g.rows.size() && ok; ++r) ok = RowHolds(g.rows[r], lhs[r]);
    if (ok) {
      double tol = 1e-9 * std::max(1.0, std::fabs(best));
      if (!found || (maximize ? obj > best + tol : obj < best - tol)) {
        found = true;
        best = obj;
        best_x = x;
      }
    }
    size_t k = n;
    bool carried = false;
    while (k-- > 0) {
      if (x[k] < d.hi[k]) {
        shift(k, 1.0);
        break;
      }
      shift(k, d.lo[k] - d.hi[k]);
      carried = true;
    }
    if (k == static_cast<size_t>(-1)) break;
    if (carried) recompute();
  }
  if (!found) {
    sol.status = SolveStatus::kInfeasible;
  } else {
    sol.status = SolveStatus::kOptimal;
    for (size_t i = 0; i < n; ++i) sol.assignment[NameOf(g, i)] = best_x[i];
    sol.objective_value = g.Evaluate(g.objective.coefs, best_x) + g.objective.constant;
  }
  sol.wall_time_seconds = Seconds(start);
  return sol;
}

ExternalSolverConfig DefaultExternalSolver() {
  ExternalSolverConfig c;
  c.command = "python3";
  c.args = {std::string(OPTVERIFIER_SOURCE_DIR) + "/tools/highs_solve.py", "{lp}", "{sol}"};
  c.format = SolutionFormat::kGenericJson;
  c.solver_id = "highs";
  return c;
}

std::optional<std::filesystem::path> FindExecutable(const std::string& command) {
  if (command.empty()) return std::nullopt;
  auto usable = [](const std::filesystem::path& p) {
    return ::access(p.c_str(), X_OK) == 0 && !std::filesystem::is_directory(p);
  };
  if (command.find('/') != std::string::npos) {
    if (usable(command)) return std::filesystem::path(command);
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  std::stringstream ss(path ? path : "/usr/bin:/bin");
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    std::filesystem::path p = std::filesystem::path(dir) / command;
    if (usable(p)) return p;
  }
  return std::nullopt;
}

namespace {

std::string Substitute(std::string arg, const std::string& lp, const std::string& sol) {
  for (auto [key, value] : {std::pair{std::string("{lp}"), lp}, std::pair{std::string("{sol}"), sol}}) {
    size_t pos = 0;
    while ((pos = arg.find(key, pos)) != std::string::npos) {
      arg.replace(pos, key.size(), value);
      pos += value.size();
    }
  }
  return arg;
}

std::map<std::string, size_t> LpNameIndex(const GroundedModel& g) {
  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < g.variables.size(); ++i) idx[SanitizeName(g.variables[i].name)] = i;
  return idx;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "optverifier-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) {
      throw Error(ErrorCode::kIoError, std::string("mkdtemp failed: ") + std::strerror(errno));
    }
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace

Solution SolveExternal(const GroundedModel& g, const ExternalSolverConfig& config) {
  auto start = Clock::now();
  auto exe = FindExecutable(config.command);
  if (!exe) {
    throw Error(ErrorCode::kSolverNotFound, "solver command '" + config.command + "' not found");
  }
  TempDir dir;
  const std::string lp = (dir.path() / "model.lp").string();
  const std::string solp = (dir.path() / "model.sol").string();
  const std::string logp = (dir.path() / "solver.log").string();
  {
    std::ofstream out(lp, std::ios::binary);
    out << EmitLp(g);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + lp);
  }
  std::vector<std::string> argv_s{exe->string()};
  for (const auto& a : config.args) argv_s.push_back(Substitute(a, lp, solp));
  std::vector<char*> argv;
  for (auto& a : argv_s) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::kIoError, "fork failed");
  if (pid == 0) {
    int fd = ::open(logp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      ::dup2(fd, STDOUT_FILENO);
      ::dup2(fd, STDERR_FILENO);
      ::close(fd);
    }
    ::execv(argv[0], argv.data());
    ::_exit(127);
  }
  int wstatus = 0;
  auto sleep = std::chrono::microseconds(500);
  while (true) {
    pid_t r = ::waitpid(pid, &wstatus, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw Error(ErrorCode::kIoError, "waitpid failed");
    if (Seconds(start) > config.timeout_seconds) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &wstatus, 0);
      throw Error(ErrorCode::kTimeout, "solver exceeded " +
                                           FormatNumber12(config.timeout_seconds) + " s");
    }
    std::this_thread::sleep_for(sleep);
    sleep = std::min(sleep * 2, std::chrono::microseconds(10000));
  }
  if (!std::filesystem::exists(solp)) {
    std::string log = ReadFile(logp);
    if (log.size() > 600) log = log.substr(log.size() - 600);
    int code = WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -1;
    throw Error(ErrorCode::kSolverParseError,
                "solver wrote no solution file (exit " + std::to_string(code) + "): " + log);
  }
  std::string text = ReadFile(solp);
  Solution sol = config.format == SolutionFormat::kCbcSol ? ParseCbcSolution(text, g)
                                                          : ParseGenericJsonSolution(text, g);
  sol.solver_id = config.solver_id;
  sol.wall_time_seconds = Seconds(start);
  return sol;
}

Solution ParseGenericJsonSolution(std::string_view text, const GroundedModel& g) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kSolverParseError, std::string("solution JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("status") || !doc["status"].is_string()) {
    throw Error(ErrorCode::kSolverParseError, "solution JSON lacks a status string");
  }
  auto status = ParseSolveStatus(doc["status"].get<std::string>());
  if (!status) {
    throw Error(ErrorCode::kSolverParseError,
                "unknown solution status '" + doc["status"].get<std::string>() + "'");
  }
  Solution sol;
  sol.status = *status;
  if (doc.contains("message") && doc["message"].is_string()) {
    sol.message = doc["message"].get<std::string>();
  }
  if (sol.status != SolveStatus::kOptimal && sol.status != SolveStatus::kFeasible) return sol;
  if (!doc.contains("values") || !doc["values"].is_object()) {
    throw Error(ErrorCode::kSolverParseError, "solution JSON lacks a values object");
  }
  const Json& values = doc["values"];
  for (const auto& v : g.variables) {
    std::string key = SanitizeName(v.name);
    if (!values.contains(key) || !values[key].is_number()) {
      throw Error(ErrorCode::kSolverParseError, "solution lacks a value for '" + key + "'");
    }
    sol.assignment[v.name] = values[key].get<double>();
  }
  if (doc.contains("objective") && doc["objective"].is_number()) {
    sol.objective_value = doc["objective"].get<double>();
  } else {
    auto x = AssignmentValues(g, sol.assignment);
    sol.objective_value = g.Evaluate(g.objective.coefs, x) + g.objective.constant;
  }
  return sol;
}

Solution ParseCbcSolution(std::string_view text, const GroundedModel& g) {
  std::istringstream in{std::string(text)};
  std::string first;
  if (!std::getline(in, first)) throw Error(ErrorCode::kSolverParseError, "empty .sol file");
  Solution sol;
  std::string lower;
  for (char c : first) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower.find("infeasible") != std::string::npos) {
    sol.status = SolveStatus::kInfeasible;
  } else if (lower.find("unbounded") != std::string::npos) {
    sol.status = SolveStatus::kUnbounded;
  } else if (lower.rfind("optimal", 0) == 0) {
    sol.status = SolveStatus::kOptimal;
  } else if (lower.rfind("stopped", 0) == 0 || lower.find("integer solution") != std::string::npos) {
    sol.status = SolveStatus::kFeasible;
  } else {
    throw Error(ErrorCode::kSolverParseError, "unrecognized .sol status line: " + first);
  }
  if (sol.status != SolveStatus::kOptimal && sol.status != SolveStatus::kFeasible) return sol;
  auto names = LpNameIndex(g);
  std::vector<double> x(g.variables.size(), 0.0);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (!tok.empty() && tok[0] == "**") tok.erase(tok.begin());
    if (tok.empty()) continue;
    if (tok.size() < 3) throw Error(ErrorCode::kSolverParseError, "bad .sol row: " + line);
    auto it = names.find(tok[1]);
    if (it == names.end()) continue;  // row activities share the format
    try {
      x[it->second] = std::stod(tok[2]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kSolverParseError, "bad value in .sol row: " + line);
    }
  }
  for (size_t i = 0; i < x.size(); ++i) sol.assignment[g.variables[i].name] = x[i];
  size_t pos = lower.find("objective value");
  if (pos != std::string::npos) {
    try {
      sol.objective_value = std::stod(first.substr(pos + 15));
    } catch (const std::exception&) {
    }
  }
  if (!sol.objective_value) {
    sol.objective_value = g.Evaluate(g.objective.coefs, x) + g.objective.constant;
  }
  return sol;
}

Solution Solve(const GroundedModel& g, const SolverConfig& config) {
  ExternalSolverConfig ext = config.external;
  if (ext.command.empty()) ext = DefaultExternalSolver();
  switch (config.backend) {
    case SolverBackend::kBruteForce:
      return BruteForceSolve(g, config.brute_force_cap);
    case SolverBackend::kExternal:
      return SolveExternal(g, ext);
    case SolverBackend::kAuto:
      if (BruteForceApplicable(g, config.auto_enumeration_cap)) {
        return BruteForceSolve(g, config.auto_enumeration_cap);
      }
      return SolveExternal(g, ext);
  }
  return SolveExternal(g, ext);
}

Json SolutionToJson(const Solution& solution, bool timing) {
  Json doc;
  doc["status"] = std::string(SolveStatusName(solution.status));
  doc["objective"] = solution.objective_value ? Json(*solution.objective_value) : Json(nullptr);
  doc["solver_id"] = solution.solver_id;
  doc["values"] = Json::object();
  for (const auto& [name, value] : solution.assignment) doc["values"][name] = value;
  if (!solution.message.empty()) doc["message"] = solution.message;
  if (timing) doc["wall_time_seconds"] = solution.wall_time_seconds;
  return doc;
}

}  // namespace optverifier
