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

#include "sublevel/error.hpp"

namespace sublevel {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kDimensionMismatch:
      return "dimension_mismatch";
    case ErrorCode::kPrecondition:
      return "precondition";
    case ErrorCode::kInfeasible:
      return "infeasible";
    case ErrorCode::kRankNotRestored:
      return "rank_not_restored";
    case ErrorCode::kNoDependentColumn:
      return "no_dependent_column";
    case ErrorCode::kHomotopyFailed:
      return "homotopy_failed";
    case ErrorCode::kDiverged:
      return "diverged";
    case ErrorCode::kDegenerateDeterminant:
      return "degenerate_determinant";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kInternal:
      return "internal";
  }
  return "unknown";
}

}  // namespace sublevel
