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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace optverifier {

enum class ErrorCode {
  kMalformedJson,
  kSchemaError,
  kSyntaxError,
  kNonstrictRequired,
  kNonlinear,
  kUnboundIndex,
  kUnboundParameter,
  kIndexOutOfRange,
  kShapeMismatch,
  kMissingColumn,
  kNameCollision,
  kSolverNotFound,
  kSolverParseError,
  kTimeout,
  kOracleInapplicable,
  kMissingVariable,
  kNoExternalParameters,
  kTransportError,
  kReplayMiss,
  kAuthError,
  kNoJsonFound,
  kAgentOutputInvalid,
  kPrecondition,
  kPerturbationExhausted,
  kTooLarge,
  kMalformedLine,
  kConfigError,
  kIoError,
};

// Upper-snake identifier used in reports and CLI messages, e.g. "REPLAY_MISS".
std::string_view ErrorCodeName(ErrorCode code);

struct SourcePos {
  int line = 1;
  int column = 1;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, SourcePos pos);

  ErrorCode code() const { return code_; }
  const std::optional<SourcePos>& pos() const { return pos_; }

 private:
  ErrorCode code_;
  std::optional<SourcePos> pos_;
};

}  // namespace optverifier
