// Copyright 2026 The USR Toolkit Authors.
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

#ifndef USR_ERRORS_HPP_
#define USR_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace usr {

// Broad failure classes; each maps onto one CLI exit code.
enum class ErrorCategory { kConfig, kData, kBackend };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Process exit code for an error category: 2 config, 3 data, 4 backend.
int exit_code_for(ErrorCategory category) noexcept;

#define USR_DEFINE_ERROR(Name, Category)                     \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& what)                   \
        : Error(ErrorCategory::Category, what) {}            \
  }

USR_DEFINE_ERROR(ConfigError, kConfig);
USR_DEFINE_ERROR(ArgumentError, kConfig);

USR_DEFINE_ERROR(ParseError, kData);
USR_DEFINE_ERROR(IntegrityError, kData);
USR_DEFINE_ERROR(RangeError, kData);
USR_DEFINE_ERROR(PreconditionError, kData);
USR_DEFINE_ERROR(UnavailableVariantError, kData);
USR_DEFINE_ERROR(UndefinedScoreError, kData);
USR_DEFINE_ERROR(DegenerateInputError, kData);
USR_DEFINE_ERROR(IncompleteInputError, kData);
USR_DEFINE_ERROR(UndefinedCorrelationError, kData);
USR_DEFINE_ERROR(InsufficientDataError, kData);

USR_DEFINE_ERROR(BackendError, kBackend);
USR_DEFINE_ERROR(BackendContractError, kBackend);
USR_DEFINE_ERROR(UnsupportedOperationError, kBackend);

#undef USR_DEFINE_ERROR

}  // namespace usr

#endif  // USR_ERRORS_HPP_
