// Copyright 2026 The sublevel Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace sublevel {

/// Failure categories. The C API maps these one-to-one onto status codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch,
  kPrecondition,
  kInfeasible,
  kRankNotRestored,
  kNoDependentColumn,
  kHomotopyFailed,
  kDiverged,
  kDegenerateDeterminant,
  kIo,
  kInternal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// An infeasible least-squares problem; carries the offending residual.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double residual)
      : Error(ErrorCode::kInfeasible, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace sublevel
