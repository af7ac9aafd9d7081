/* Copyright 2026 The DriveAgent Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef DRIVEAGENT_ERRORS_HPP
#define DRIVEAGENT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace driveagent {

// Every recoverable failure in the library carries one of these codes so
// callers and tests can dispatch on identity rather than message text.
enum class ErrorCode {
  // trace ingestion
  MalformedRecord,
  NonMonotonicTimestamp,
  UnknownCategory,
  DuplicateDetection,
  NoFrameInWindow,
  // filtration
  EmptyImuStream,
  // vehicle reasoning
  TimestampMismatch,
  // response generation
  EmptyInsightSet,
  // agent layer
  MissingContextField,
  MissingSection,
  FieldTypeMismatch,
  InvariantViolation,
  TransportFailure,
  CredentialMissing,
  SchemaViolation,
  // synthesis
  InvalidSpec,
  OutOfRange,
  // evaluation
  CaseMismatch,
  // configuration / io
  InvalidConfig,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace driveagent

#endif  // DRIVEAGENT_ERRORS_HPP
