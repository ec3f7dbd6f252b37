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

#include "optverifier/gateway.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace optverifier {

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

TokenUsage& TokenUsage::operator+=(const TokenUsage& other) {
  prompt_tokens += other.prompt_tokens;
  completion_tokens += other.completion_tokens;
  estimated = estimated || other.estimated;
  return *this;
}

std::int64_t EstimateTokens(std::string_view text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

TokenUsage EstimateUsage(const ChatRequest& request, std::string_view completion) {
  TokenUsage u;
  for (const auto& m : request.messages) u.prompt_tokens += EstimateTokens(m.content);
  u.completion_tokens = EstimateTokens(completion);
  u.estimated = true;
  return u;
}

namespace {

std::string CollapseWhitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) out += ' ';
      in_space = true;
    } else {
      out += c;
      in_space = false;
    }
  }
  return out;
}

std::string Preview(const ChatRequest& request) {
  if (request.messages.empty()) return "(no messages)";
  const ChatMessage& last = request.messages.back();
  std::string text = CollapseWhitespace(last.content);
  if (text.size() > 40) text.resize(40);
  return std::string(RoleName(last.role)) + ": \"" + text + "\"";
}

}  // namespace

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, data.data(), data.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string Fingerprint(const ChatRequest& request) {
  // Unit/record separators keep field boundaries unambiguous.
  std::string canonical = request.model_name;
  for (const auto& m : request.messages) {
    canonical += '\x1e';
    canonical += RoleName(m.role);
    canonical += '\x1f';
    canonical += CollapseWhitespace(m.content);
  }
  return Sha256Hex(canonical);
}

// ---------------------------------------------------------------------------
// Cassettes

bool Cassette::Add(CassetteEntry entry) {
  if (index_.count(entry.fingerprint)) return false;
  index_.emplace(entry.fingerprint, entries_.size());
  entries_.push_back(std::move(entry));
  return true;
}

const ChatResponse* Cassette::Find(const std::string& fingerprint) const {
  auto it = index_.find(fingerprint);
  return it == index_.end() ? nullptr : &entries_[it->second].response;
}

Cassette Cassette::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open cassette " + path.string());
  }
  Cassette c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kMalformedLine, path.string() + ":" +
                                                 std::to_string(line_no) + ": " +
                                                 e.what());
    }
    if (j.contains("meta")) {
      c.metadata_ = j.at("meta");
      continue;
    }
    if (!j.contains("fp") || !j.contains("response")) {
      throw Error(ErrorCode::kMalformedLine,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected keys \"fp\" and \"response\"");
    }
    CassetteEntry e;
    e.fingerprint = j.at("fp").get<std::string>();
    const Json& r = j.at("response");
    e.response.content = r.value("content", "");
    e.response.usage.prompt_tokens = r.value("prompt_tokens", std::int64_t{0});
    e.response.usage.completion_tokens = r.value("completion_tokens", std::int64_t{0});
    e.response.usage.estimated = r.value("estimated", false);
    c.Add(std::move(e));
  }
  return c;
}

std::string CassetteLine(const CassetteEntry& entry) {
  Json r;
  r["content"] = entry.response.content;
  r["prompt_tokens"] = entry.response.usage.prompt_tokens;
  r["completion_tokens"] = entry.response.usage.completion_tokens;
  if (entry.response.usage.estimated) r["estimated"] = true;
  Json j;
  j["fp"] = entry.fingerprint;
  j["response"] = r;
  return j.dump();
}

ChatResponse ReplayBackend::Complete(const ChatRequest& request) {
  std::string fp = Fingerprint(request);
  const ChatResponse* hit = cassette_.Find(fp);
  if (!hit) {
    throw Error(ErrorCode::kReplayMiss,
                "no cassette entry for request " + fp.substr(0, 12) + " (" +
                    Preview(request) + ")");
  }
  return *hit;
}

RecordingBackend::RecordingBackend(std::shared_ptr<ChatBackend> inner,
                                   std::filesystem::path path,
                                   const std::string& model_name)
    : inner_(std::move(inner)), path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    recorded_ = Cassette::Load(path_);
  } else {
    std::ofstream out(path_);
    if (!out) {
      throw Error(ErrorCode::kIoError, "cannot create cassette " + path_.string());
    }
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char date[32];
    std::strftime(date, sizeof(date), "%Y-%m-%d", std::gmtime(&now));
    Json meta;
    meta["meta"] = {{"model_name", model_name}, {"recorded", date}};
    out << meta.dump() << "\n";
  }
}

ChatResponse RecordingBackend::Complete(const ChatRequest& request) {
  std::string fp = Fingerprint(request);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (const ChatResponse* hit = recorded_.Find(fp)) return *hit;
  }
  ChatResponse response = inner_->Complete(request);
  std::lock_guard<std::mutex> lock(mu_);
  CassetteEntry entry{fp, response};
  if (recorded_.Add(entry)) {
    std::ofstream out(path_, std::ios::app);
    out << CassetteLine(entry) << "\n";
  }
  return response;
}

// ---------------------------------------------------------------------------
// Live backend

Json ChatRequestToJson(const ChatRequest& request) {
  Json body;
  body["model"] = request.model_name;
  body["messages"] = Json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back({{"role", RoleName(m.role)}, {"content", m.content}});
  }
  body["temperature"] = request.temperature;
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

ChatResponse ParseChatCompletion(const ChatRequest& request, const Json& body) {
  ChatResponse r;
  try {
    r.content = body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kTransportError,
                std::string("malformed chat completion: ") + e.what());
  }
  if (body.contains("usage") && body.at("usage").is_object() &&
      body.at("usage").contains("prompt_tokens")) {
    const Json& u = body.at("usage");
    r.usage.prompt_tokens = u.value("prompt_tokens", std::int64_t{0});
    r.usage.completion_tokens = u.value("completion_tokens", std::int64_t{0});
  } else {
    r.usage = EstimateUsage(request, r.content);
  }
  return r;
}

ChatResponse LiveBackend::Complete(const ChatRequest& request) {
  if (config_.api_key.empty()) {
    throw Error(ErrorCode::kAuthError, "OPTVERIFIER_API_KEY is empty");
  }
  const std::string& url = config_.base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfigError, "base_url needs a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  std::string origin = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  auto secs = static_cast<time_t>(config_.timeout_seconds);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  client.set_connection_timeout(std::min<time_t>(secs, 30), 0);
  httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
  auto res = client.Post(prefix + "/chat/completions", headers,
                         ChatRequestToJson(request).dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kTransportError,
                "request to " + origin + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw Error(ErrorCode::kAuthError, "provider rejected credentials (HTTP " +
                                           std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kTransportError,
                "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  Json body;
  try {
    body = Json::parse(res->body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kTransportError, std::string("non-JSON reply: ") + e.what());
  }
  return ParseChatCompletion(request, body);
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, GatewayConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {
  if (!config_.sleep) {
    config_.sleep = [](double seconds) {
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
  }
}

ChatResponse Gateway::Complete(const ChatRequest& request) const {
  if (request.messages.empty()) {
    throw Error(ErrorCode::kPrecondition, "chat request has no messages");
  }
  for (int attempt = 0;; ++attempt) {
    try {
      return backend_->Complete(request);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTransportError || attempt >= config_.max_retries) {
        throw;
      }
      double wait = config_.backoff_seconds.empty()
                        ? 0.0
                        : config_.backoff_seconds[std::min<size_t>(
                              attempt, config_.backoff_seconds.size() - 1)];
      config_.sleep(wait);
    }
  }
}

ChatResponse Gateway::Complete(std::vector<ChatMessage> messages) const {
  ChatRequest request;
  request.model_name = config_.model_name;
  request.messages = std::move(messages);
  request.temperature = config_.temperature;
  request.seed = config_.seed;
  return Complete(request);
}

// ---------------------------------------------------------------------------
// JSON extraction

namespace {

// Drops commas that directly precede '}' or ']' outside string literals.
std::string StripTrailingCommas(std::string_view text) {
  std::string out;
  bool in_string = false;
  bool escaped = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      out += c;
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
      continue;
    }
    if (c == ',') {
      size_t j = i + 1;
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && (text[j] == '}' || text[j] == ']')) continue;
    }
    out += c;
  }
  return out;
}

std::optional<Json> TryParse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error&) {
  }
  std::string repaired = StripTrailingCommas(text);
  try {
    return Json::parse(repaired);
  } catch (const Json::parse_error&) {
    return std::nullopt;
  }
}

std::vector<std::string_view> FencedBlocks(std::string_view text) {
  std::vector<std::string_view> blocks;
  size_t at = 0;
  while (true) {
    size_t open = text.find("```json", at);
    if (open == std::string_view::npos) break;
    size_t body = open + 7;
    size_t close = text.find("```", body);
    if (close == std::string_view::npos) break;
    blocks.push_back(text.substr(body, close - body));
    at = close + 3;
  }
  return blocks;
}

// Balanced {...} / [...] spans, string-literal aware.
std::vector<std::string_view> BalancedSpans(std::string_view text) {
  std::vector<std::string_view> spans;
  for (size_t start = 0; start < text.size(); ++start) {
    if (text[start] != '{' && text[start] != '[') continue;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{' || c == '[') {
        ++depth;
      } else if (c == '}' || c == ']') {
        if (--depth == 0) {
          spans.push_back(text.substr(start, i - start + 1));
          break;
        }
      }
    }
  }
  std::stable_sort(spans.begin(), spans.end(),
                   [](std::string_view a, std::string_view b) { return a.size() > b.size(); });
  return spans;
}

}  // namespace

std::vector<Json> ExtractJsonBlocks(std::string_view text) {
  std::vector<Json> out;
  for (auto block : FencedBlocks(text)) {
    if (auto j = TryParse(block)) out.push_back(std::move(*j));
  }
  return out;
}

Json ExtractJsonBlock(std::string_view text) {
  for (auto block : FencedBlocks(text)) {
    if (auto j = TryParse(block)) return *j;
  }
  for (auto span : BalancedSpans(text)) {
    if (auto j = TryParse(span)) return *j;
  }
  throw Error(ErrorCode::kNoJsonFound, "no parseable JSON in agent output");
}

// ---------------------------------------------------------------------------
// Accounting

void StageUsage::Add(const TokenUsage& usage) {
  ++calls;
  prompt_tokens += usage.prompt_tokens;
  completion_tokens += usage.completion_tokens;
  estimated = estimated || usage.estimated;
}

UsageTotals SumUsage(const std::vector<UsageRecord>& records) {
  UsageTotals totals;
  for (const auto& r : records) {
    totals.Add(r.usage);
    totals.by_stage[r.stage].Add(r.usage);
  }
  return totals;
}

}  // namespace optverifier
