// Copyright 2026 The PromptStack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROMPTSTACK_ERRORS_HPP_
#define PROMPTSTACK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace promptstack {

// Every failure the library can signal, one code per distinct contract
// violation so callers (and the CLI exit-code mapping) can dispatch on it.
enum class ErrorCode {
  kEmptyWeights,
  kNegativeWeight,
  kZeroSum,
  kInvalidDistribution,
  kSupportMismatch,
  kDimensionMismatch,
  kUnknownContext,
  kBackendUnavailable,
  kSamplerFailure,
  kAllInfiniteDivergence,
  kDanglingReference,
  kInvalidProbability,
  kAuthMissing,
  kTimeout,
  kHttpError,
  kRetriesExhausted,
  kUnclassifiedRateExceeded,
  kConfigParse,
  kValidation,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  Error(ErrorCode code, const std::string& message, long detail)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const { return code_; }

  // Code-specific payload: offending index, HTTP status, or line number.
  long detail() const { return detail_; }

 private:
  ErrorCode code_;
  long detail_ = 0;
};

}  // namespace promptstack

#endif  // PROMPTSTACK_ERRORS_HPP_
