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

// Chat-completion access with token accounting and record/replay.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "optverifier/model.hpp"

namespace optverifier {

enum class Role { kSystem, kUser, kAssistant };
std::string_view RoleName(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;
};

struct ChatRequest {
  std::string model_name;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool estimated = false;

  TokenUsage& operator+=(const TokenUsage& other);
};

struct ChatResponse {
  std::string content;
  TokenUsage usage;
};

// ceil(characters / 4), the fallback when a provider reports no usage.
std::int64_t EstimateTokens(std::string_view text);
TokenUsage EstimateUsage(const ChatRequest& request, std::string_view completion);

// SHA-256 (hex) over the model name and each message role and content with
// whitespace runs collapsed to one space. Temperature and seed are excluded.
std::string Fingerprint(const ChatRequest& request);

// Hex SHA-256 of arbitrary text.
std::string Sha256Hex(std::string_view data);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse Complete(const ChatRequest& request) = 0;
};

struct CassetteEntry {
  std::string fingerprint;
  ChatResponse response;
};

// JSON Lines log of recorded responses keyed by request fingerprint. An
// optional first line {"meta": {...}} carries the recorded model and date.
class Cassette {
 public:
  static Cassette Load(const std::filesystem::path& path);

  const ChatResponse* Find(const std::string& fingerprint) const;
  size_t size() const { return entries_.size(); }
  const std::vector<CassetteEntry>& entries() const { return entries_; }
  const Json& metadata() const { return metadata_; }

  // Returns false when the fingerprint is already present.
  bool Add(CassetteEntry entry);

 private:
  std::vector<CassetteEntry> entries_;
  std::unordered_map<std::string, size_t> index_;
  Json metadata_ = Json::object();
};

std::string CassetteLine(const CassetteEntry& entry);

class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(Cassette cassette) : cassette_(std::move(cassette)) {}
  ChatResponse Complete(const ChatRequest& request) override;

 private:
  Cassette cassette_;
};

// Forwards to `inner` and appends each new (fingerprint, response) pair to
// the cassette file.
class RecordingBackend : public ChatBackend {
 public:
  RecordingBackend(std::shared_ptr<ChatBackend> inner,
                   std::filesystem::path path, const std::string& model_name);
  ChatResponse Complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path path_;
  std::mutex mu_;
  Cassette recorded_;
};

class FunctionBackend : public ChatBackend {
 public:
  using Handler = std::function<ChatResponse(const ChatRequest&)>;
  explicit FunctionBackend(Handler handler) : handler_(std::move(handler)) {}
  ChatResponse Complete(const ChatRequest& request) override {
    return handler_(request);
  }

 private:
  Handler handler_;
};

struct LiveConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  double timeout_seconds = 120.0;
};

// OpenAI-compatible POST {base_url}/chat/completions.
class LiveBackend : public ChatBackend {
 public:
  explicit LiveBackend(LiveConfig config) : config_(std::move(config)) {}
  ChatResponse Complete(const ChatRequest& request) override;

 private:
  LiveConfig config_;
};

Json ChatRequestToJson(const ChatRequest& request);
ChatResponse ParseChatCompletion(const ChatRequest& request, const Json& body);

struct GatewayConfig {
  std::string model_name = "gpt-4o-mini";
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  int max_retries = 3;
  std::vector<double> backoff_seconds = {0.5, 1.0, 2.0};
  // Replaced in tests to avoid real sleeps.
  std::function<void(double)> sleep;
};

class Gateway {
 public:
  Gateway(std::shared_ptr<ChatBackend> backend, GatewayConfig config = {});

  // Retries TRANSPORT_ERROR up to max_retries times with backoff.
  ChatResponse Complete(const ChatRequest& request) const;
  ChatResponse Complete(std::vector<ChatMessage> messages) const;

  const GatewayConfig& config() const { return config_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  GatewayConfig config_;
};

// First fenced ```json block that parses; otherwise the largest
// brace-balanced substring that parses. One trailing-comma repair pass is
// tried before giving up on a candidate.
Json ExtractJsonBlock(std::string_view text);
// Every fenced ```json block that parses, in order.
std::vector<Json> ExtractJsonBlocks(std::string_view text);

struct UsageRecord {
  std::string stage;
  TokenUsage usage;
};

struct StageUsage {
  std::int64_t calls = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool estimated = false;

  void Add(const TokenUsage& usage);
  std::int64_t total_tokens() const { return prompt_tokens + completion_tokens; }
};

struct UsageTotals : StageUsage {
  std::map<std::string, StageUsage> by_stage;
};

UsageTotals SumUsage(const std::vector<UsageRecord>& records);

}  // namespace optverifier
