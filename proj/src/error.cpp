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

#include "optverifier/error.hpp"

namespace optverifier {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedJson: return "MALFORMED_JSON";
    case ErrorCode::kSchemaError: return "SCHEMA_ERROR";
    case ErrorCode::kSyntaxError: return "SYNTAX_ERROR";
    case ErrorCode::kNonstrictRequired: return "NONSTRICT_REQUIRED";
    case ErrorCode::kNonlinear: return "NONLINEAR";
    case ErrorCode::kUnboundIndex: return "UNBOUND_INDEX";
    case ErrorCode::kUnboundParameter: return "UNBOUND_PARAMETER";
    case ErrorCode::kIndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case ErrorCode::kShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::kMissingColumn: return "MISSING_COLUMN";
    case ErrorCode::kNameCollision: return "NAME_COLLISION";
    case ErrorCode::kSolverNotFound: return "SOLVER_NOT_FOUND";
    case ErrorCode::kSolverParseError: return "SOLVER_PARSE_ERROR";
    case ErrorCode::kTimeout: return "TIMEOUT";
    case ErrorCode::kOracleInapplicable: return "ORACLE_INAPPLICABLE";
    case ErrorCode::kMissingVariable: return "MISSING_VARIABLE";
    case ErrorCode::kNoExternalParameters: return "NO_EXTERNAL_PARAMETERS";
    case ErrorCode::kTransportError: return "TRANSPORT_ERROR";
    case ErrorCode::kReplayMiss: return "REPLAY_MISS";
    case ErrorCode::kAuthError: return "AUTH_ERROR";
    case ErrorCode::kNoJsonFound: return "NO_JSON_FOUND";
    case ErrorCode::kAgentOutputInvalid: return "AGENT_OUTPUT_INVALID";
    case ErrorCode::kPrecondition: return "PRECONDITION_FAILED";
    case ErrorCode::kPerturbationExhausted: return "PERTURBATION_EXHAUSTED";
    case ErrorCode::kTooLarge: return "TOO_LARGE";
    case ErrorCode::kMalformedLine: return "MALFORMED_LINE";
    case ErrorCode::kConfigError: return "CONFIG_ERROR";
    case ErrorCode::kIoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

namespace {

std::string WithCode(ErrorCode code, const std::string& message) {
  return std::string(ErrorCodeName(code)) + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(WithCode(code, message)), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, SourcePos pos)
    : std::runtime_error(WithCode(code, message) + " (line " +
                         std::to_string(pos.line) + ", column " +
                         std::to_string(pos.column) + ")"),
      code_(code),
      pos_(pos) {}

}  // namespace optverifier
