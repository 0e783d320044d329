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

#ifndef DMIA_DATASETS_H_
#define DMIA_DATASETS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dmia/numerics.h"
#include "nlohmann/json.hpp"

namespace dmia {

struct Dataset {
  std::string name;
  std::size_t dim = 0;
  std::vector<Vector> samples;
};

enum class SyntheticKind { kGaussianMixture2d, kPatternedPatches8x8 };

absl::StatusOr<SyntheticKind> ParseSyntheticKind(absl::string_view name);
absl::string_view SyntheticKindName(SyntheticKind kind);

// gaussian-mixture-2d: four fixed components, clamped to [-1, 1].
// patterned-patches-8x8: 64-dim bar/blob patterns with random phase plus a
// per-sample texture, min-max scaled to [-1, 1].
absl::StatusOr<Dataset> GenerateSynthetic(SyntheticKind kind,
                                          std::size_t count, SeededRng& rng);

struct SplitManifest {
  std::vector<std::size_t> member_indices;     // sorted
  std::vector<std::size_t> nonmember_indices;  // sorted
  std::uint64_t seed = 0;
  double fraction = 0.5;

  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

// Uniform random member/non-member split; round(fraction * n) members.
absl::StatusOr<SplitManifest> Split(const Dataset& dataset, double fraction,
                                    SeededRng& rng);

nlohmann::json SplitToJson(const SplitManifest& split);
absl::StatusOr<SplitManifest> SplitFromJson(const nlohmann::json& j,
                                            std::size_t dataset_size);

inline constexpr std::uint16_t kDatasetVersion = 1;

// DSET container: values are stored as 32-bit floats.
std::string EncodeDataset(const Dataset& dataset);
absl::StatusOr<Dataset> DecodeDataset(absl::string_view bytes,
                                      std::string name = "dataset");
absl::Status SaveDataset(const Dataset& dataset, const std::string& path);
absl::StatusOr<Dataset> LoadDataset(const std::string& path);

}  // namespace dmia

#endif  // DMIA_DATASETS_H_
