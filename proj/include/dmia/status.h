// Copyright 2026 The DMIA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DMIA_STATUS_H_
#define DMIA_STATUS_H_


#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

// Error classes map onto absl status codes:
//   invalid-argument    -> kInvalidArgument
//   numeric-degenerate  -> kOutOfRange
//   checkpoint/dataset corrupt -> kDataLoss (message names which)
//   training-diverged   -> kAborted
//   eval-degenerate     -> kFailedPrecondition
//   missing input file  -> kNotFound
//   unwritable output   -> kPermissionDenied

#define DMIA_STATUS_CONCAT_INNER_(a, b) a##b
#define DMIA_STATUS_CONCAT_(a, b) DMIA_STATUS_CONCAT_INNER_(a, b)

#define DMIA_RETURN_IF_ERROR(expr)                 \
  do {                                             \
    if (absl::Status _dmia_status = (expr);        \
        !_dmia_status.ok()) {                      \
      return _dmia_status;                         \
    }                                              \
  } while (false)

#define DMIA_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                \
  if (!tmp.ok()) return std::move(tmp).status();    \
  lhs = std::move(tmp).value()

#define DMIA_ASSIGN_OR_RETURN(lhs, expr)                                    \
  DMIA_ASSIGN_OR_RETURN_IMPL_(                                              \
      DMIA_STATUS_CONCAT_(_dmia_statusor_, __LINE__), lhs, expr)

namespace dmia {

inline absl::Status NumericDegenerateError(absl::string_view message) {
  return absl::OutOfRangeError(message);
}

inline absl::Status EvalDegenerateError(absl::string_view message) {
  return absl::FailedPreconditionError(message);
}

inline absl::Status TrainingDivergedError(absl::string_view message) {
  return absl::AbortedError(message);
}

}  // namespace dmia

#endif  // DMIA_STATUS_H_
