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

#include "dmia/datasets.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "binary_io.h"
#include "dmia/status.h"

namespace dmia {
namespace {

constexpr std::size_t kPatchSide = 8;
constexpr double kMixtureStd = 0.12;
constexpr std::array<std::array<double, 2>, 4> kMixtureCenters = {{
    {-0.5, -0.5}, {-0.5, 0.5}, {0.5, -0.5}, {0.5, 0.5}}};
// Amplitude of the i.i.d. per-pixel texture added on top of the pattern.
constexpr double kTextureStd = 0.35;

Vector MixtureSample(SeededRng& rng) {
  const auto& c = kMixtureCenters[rng.NextBelow(kMixtureCenters.size())];
  std::vector<double> v(2);
  for (int i = 0; i < 2; ++i) {
    v[i] = std::clamp(c[i] + kMixtureStd * rng.NextGaussian(), -1.0, 1.0);
  }
  return Vector(std::move(v));
}

Vector PatchSample(SeededRng& rng) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::vector<double> v(kPatchSide * kPatchSide);
  const std::uint64_t pattern = rng.NextBelow(4);
  const double phase = kTwoPi * rng.NextUniform();
  const double cycles = 1.0 + 2.0 * rng.NextUniform();
  const double cx = 1.5 + 4.0 * rng.NextUniform();
  const double cy = 1.5 + 4.0 * rng.NextUniform();
  const double radius = 1.0 + 2.0 * rng.NextUniform();
  for (std::size_t y = 0; y < kPatchSide; ++y) {
    for (std::size_t x = 0; x < kPatchSide; ++x) {
      const double fx = static_cast<double>(x) / kPatchSide;
      const double fy = static_cast<double>(y) / kPatchSide;
      double value = 0.0;
      switch (pattern) {
        case 0:  // horizontal bars
          value = std::sin(kTwoPi * cycles * fy + phase);
          break;
        case 1:  // vertical bars
          value = std::sin(kTwoPi * cycles * fx + phase);
          break;
        case 2:  // diagonal bars
          value = std::sin(kTwoPi * cycles * (fx + fy) / 2.0 + phase);
          break;
        default: {  // blob with a phase-shifted ring
          const double dx = static_cast<double>(x) - cx;
          const double dy = static_cast<double>(y) - cy;
          const double r2 = (dx * dx + dy * dy) / (radius * radius);
          value = std::exp(-0.5 * r2) * std::cos(phase + std::sqrt(r2));
          break;
        }
      }
      v[y * kPatchSide + x] = value + kTextureStd * rng.NextGaussian();
    }
  }
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& x : v) {
    x = range > 0.0 ? std::clamp(2.0 * (x - min) / range - 1.0, -1.0, 1.0)
                    : 0.0;
  }
  return Vector(std::move(v));
}

}  // namespace

absl::StatusOr<SyntheticKind> ParseSyntheticKind(absl::string_view name) {
  if (name == "gaussian-mixture-2d") return SyntheticKind::kGaussianMixture2d;
  if (name == "patterned-patches-8x8") {
    return SyntheticKind::kPatternedPatches8x8;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown dataset kind '", name, "'"));
}

absl::string_view SyntheticKindName(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kGaussianMixture2d:
      return "gaussian-mixture-2d";
    case SyntheticKind::kPatternedPatches8x8:
      return "patterned-patches-8x8";
  }
  return "unknown";
}

absl::StatusOr<Dataset> GenerateSynthetic(SyntheticKind kind,
                                          std::size_t count, SeededRng& rng) {
  if (count < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("synthetic dataset needs count >= 2, got ", count));
  }
  Dataset out;
  out.name = std::string(SyntheticKindName(kind));
  out.dim = kind == SyntheticKind::kGaussianMixture2d
                ? 2
                : kPatchSide * kPatchSide;
  out.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector v = kind == SyntheticKind::kGaussianMixture2d ? MixtureSample(rng)
                                                         : PatchSample(rng);
    // Quantize to the on-disk precision so save/load is lossless.
    for (double& x : v.mutable_values()) x = static_cast<float>(x);
    out.samples.push_back(std::move(v));
  }
  return out;
}

absl::StatusOr<SplitManifest> Split(const Dataset& dataset, double fraction,
                                    SeededRng& rng) {
  const std::size_t n = dataset.samples.size();
  if (!(fraction > 0.0 && fraction < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("split fraction must be in (0, 1), got ", fraction));
  }
  const auto members =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (members == 0 || members >= n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "fraction ", fraction, " of ", n, " samples leaves one side empty"));
  }
  const std::vector<std::size_t> perm = Permutation(rng, n);
  SplitManifest split;
  split.seed = rng.master_seed();
  split.fraction = fraction;
  split.member_indices.assign(perm.begin(), perm.begin() + members);
  split.nonmember_indices.assign(perm.begin() + members, perm.end());
  std::sort(split.member_indices.begin(), split.member_indices.end());
  std::sort(split.nonmember_indices.begin(), split.nonmember_indices.end());
  return split;
}

nlohmann::json SplitToJson(const SplitManifest& split) {
  return nlohmann::json{{"member_indices", split.member_indices},
                        {"nonmember_indices", split.nonmember_indices},
                        {"seed", split.seed},
                        {"fraction", split.fraction}};
}

absl::StatusOr<SplitManifest> SplitFromJson(const nlohmann::json& j,
                                            std::size_t dataset_size) {
  SplitManifest split;
  try {
    split.member_indices =
        j.at("member_indices").get<std::vector<std::size_t>>();
    split.nonmember_indices =
        j.at("nonmember_indices").get<std::vector<std::size_t>>();
    split.seed = j.at("seed").get<std::uint64_t>();
    split.fraction = j.at("fraction").get<double>();
  } catch (const nlohmann::json::exception& e) {
    return absl::DataLossError(
        absl::StrCat("malformed split manifest: ", e.what()));
  }
  std::vector<bool> seen(dataset_size, false);
  for (const auto* side : {&split.member_indices, &split.nonmember_indices}) {
    for (std::size_t idx : *side) {
      if (idx >= dataset_size || seen[idx]) {
        return absl::DataLossError(absl::StrCat(
            "split manifest index ", idx, " out of range or duplicated"));
      }
      seen[idx] = true;
    }
  }
  if (split.member_indices.size() + split.nonmember_indices.size() !=
      dataset_size) {
    return absl::DataLossError(
        "split manifest does not cover the dataset");
  }
  return split;
}

namespace {
constexpr absl::string_view kDatasetMagic = "DSET";
}  // namespace

std::string EncodeDataset(const Dataset& dataset) {
  internal::ByteWriter w;
  w.Bytes(kDatasetMagic);
  w.U16(kDatasetVersion);
  w.U32(static_cast<std::uint32_t>(dataset.dim));
  w.U32(static_cast<std::uint32_t>(dataset.samples.size()));
  for (const Vector& v : dataset.samples) {
    for (double x : v.values()) w.F32(static_cast<float>(x));
  }
  w.Crc32Trailer();
  return w.bytes();
}

absl::StatusOr<Dataset> DecodeDataset(absl::string_view bytes,
                                      std::string name) {
  auto corrupt = [](std::size_t offset, absl::string_view why) {
    return absl::DataLossError(
        absl::StrCat("dataset corrupt at byte offset ", offset, ": ", why));
  };
  internal::ByteReader r(bytes);
  auto magic = r.Bytes(4);
  if (!magic || *magic != kDatasetMagic) return corrupt(0, "bad magic");
  auto version = r.U16();
  auto dim = r.U32();
  auto count = r.U32();
  if (!count) return corrupt(r.offset(), "truncated header");
  if (*version != kDatasetVersion) {
    return corrupt(4, absl::StrCat("unsupported version ", *version));
  }
  if (*dim == 0) return corrupt(6, "dim is 0");
  const std::size_t header = r.offset();
  const std::size_t body = std::size_t{*dim} * *count * 4;
  if (bytes.size() != header + body + 4) {
    return corrupt(std::min(bytes.size(), header + body),
                   absl::StrCat("header promises ", body + 4,
                                " payload bytes, file has ",
                                bytes.size() - header));
  }
  DMIA_ASSIGN_OR_RETURN(absl::string_view payload,
                        internal::StripCrc32(bytes, "dataset"));
  r = internal::ByteReader(payload.substr(header));
  Dataset out;
  out.name = std::move(name);
  out.dim = *dim;
  out.samples.reserve(*count);
  for (std::uint32_t i = 0; i < *count; ++i) {
    std::vector<double> v(*dim);
    for (double& x : v) {
      const std::size_t at = header + r.offset();
      x = *r.F32();
      if (!std::isfinite(x)) return corrupt(at, "non-finite value");
    }
    out.samples.emplace_back(std::move(v));
  }
  return out;
}

absl::Status SaveDataset(const Dataset& dataset, const std::string& path) {
  return internal::WriteFile(path, EncodeDataset(dataset));
}

absl::StatusOr<Dataset> LoadDataset(const std::string& path) {
  DMIA_ASSIGN_OR_RETURN(std::string bytes, internal::ReadFile(path));
  return DecodeDataset(bytes, std::filesystem::path(path).stem().string());
}

}  // namespace dmia
