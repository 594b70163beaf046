// Copyright 2026 The CRL Authors.
//
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

#include "crl/error.hpp"

namespace crl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kTruncatedHeader: return "truncated header";
    case ErrorCode::kTruncatedRecords: return "truncated records";
    case ErrorCode::kLengthMismatch: return "length mismatch";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kDuplicateLabel: return "duplicate label";
    case ErrorCode::kLabelOutOfRange: return "label out of range";
    case ErrorCode::kDimensionTooLarge: return "dimension too large";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kZeroVector: return "zero vector";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kSeparationUnreachable: return "separation unreachable";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code) {}

}  // namespace crl
