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

#ifndef CRL_ERROR_HPP_
#define CRL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace crl {

enum class ErrorCode {
  kIo,
  kBadMagic,
  kVersionMismatch,
  kTruncatedHeader,
  kTruncatedRecords,
  kLengthMismatch,
  kNonFinite,
  kDuplicateLabel,
  kLabelOutOfRange,
  kDimensionTooLarge,
  kDimensionMismatch,
  kZeroVector,
  kEmptyInput,
  kInvalidArgument,
  kSeparationUnreachable,
};

/// Short stable tag for a code, e.g. "bad magic". Used as the prefix of
/// every diagnostic so callers and tests can match on it.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crl

#endif  // CRL_ERROR_HPP_
