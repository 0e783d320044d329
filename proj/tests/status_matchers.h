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

#ifndef DMIA_TESTS_STATUS_MATCHERS_H_
#define DMIA_TESTS_STATUS_MATCHERS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gmock/gmock.h"

namespace dmia::testing {

inline const absl::Status& GetStatus(const absl::Status& status) {
  return status;
}
template <typename T>
const absl::Status& GetStatus(const absl::StatusOr<T>& status_or) {
  return status_or.status();
}

MATCHER(IsOk, "is OK") {
  const absl::Status& s = GetStatus(arg);
  *result_listener << "status " << s;
  return s.ok();
}

MATCHER_P(StatusIs, code,
          "has code " + absl::StatusCodeToString(absl::StatusCode(code))) {
  const absl::Status& s = GetStatus(arg);
  *result_listener << "status " << s;
  return s.code() == code;
}

MATCHER_P2(StatusIs, code, substring,
           "has code " + absl::StatusCodeToString(absl::StatusCode(code)) +
               " and message containing \"" + std::string(substring) + "\"") {
  const absl::Status& s = GetStatus(arg);
  *result_listener << "status " << s;
  return s.code() == code &&
         s.message().find(substring) != absl::string_view::npos;
}

}  // namespace dmia::testing

#endif  // DMIA_TESTS_STATUS_MATCHERS_H_
