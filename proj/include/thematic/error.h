// Copyright 2026 The Thematic Authors.
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

#ifndef THEMATIC_ERROR_H_
#define THEMATIC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace thematic {

enum class ErrorCode : int {
#define THEMATIC_ERROR(name, value) k##name = value,
#include "thematic/error_codes.def"
#undef THEMATIC_ERROR
};

// Stable name of an error code, e.g. "PhaseOrderViolation".
std::string_view error_name(ErrorCode code);

// Every engine failure is reported as an Error carrying the domain error
// code. The message is human oriented; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  std::string_view name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace thematic

#endif  // THEMATIC_ERROR_H_
