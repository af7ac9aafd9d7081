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

#include "driveagent/errors.hpp"

namespace driveagent {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::DuplicateDetection: return "DuplicateDetection";
    case ErrorCode::NoFrameInWindow: return "NoFrameInWindow";
    case ErrorCode::EmptyImuStream: return "EmptyImuStream";
    case ErrorCode::TimestampMismatch: return "TimestampMismatch";
    case ErrorCode::EmptyInsightSet: return "EmptyInsightSet";
    case ErrorCode::MissingContextField: return "MissingContextField";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::FieldTypeMismatch: return "FieldTypeMismatch";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::TransportFailure: return "TransportFailure";
    case ErrorCode::CredentialMissing: return "CredentialMissing";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::CaseMismatch: return "CaseMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace driveagent
