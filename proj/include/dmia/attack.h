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

#ifndef DMIA_ATTACK_H_
#define DMIA_ATTACK_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dmia/denoiser.h"
#include "dmia/diffusion.h"
#include "dmia/numerics.h"

namespace dmia {

enum class InjectionMode {
  // x0 -> sqrt(ab_t) x0 + sqrt(1 - ab_t) eps at attack_t.
  kSchedule,
  // x0 -> x0 + sigma * eps, then treated as if it sat at attack_t.
  kDirect,
};

enum class AggregationMetric { kL1, kMse, kCentroid, kDensity, kVolume };

absl::StatusOr<InjectionMode> ParseInjectionMode(absl::string_view name);
absl::string_view InjectionModeName(InjectionMode mode);
absl::StatusOr<AggregationMetric> ParseAggregationMetric(absl::string_view name);
absl::string_view AggregationMetricName(AggregationMetric metric);

struct AttackConfig {
  int attack_t = 80;
  int k = 5;
  int stride_m = 10;
  double sigma = 0.1;
  InjectionMode injection_mode = InjectionMode::kDirect;
  AggregationMetric metric = AggregationMetric::kMse;
  double delta = 1e-10;
};

// k >= 2, sigma > 0, delta > 0, attack_t <= T and every queried timestep
// attack_t - i * stride_m (i < k) is >= 1.
absl::Status ValidateAttackConfig(const AttackConfig& config,
                                  const NoiseSchedule& schedule);

struct InjectedSample {
  Vector noisy;
  Vector eps;
};

// One Gaussian draw, no model queries.
absl::StatusOr<InjectedSample> InjectNoise(const NoiseSchedule& schedule,
                                           const Vector& x0,
                                           const AttackConfig& config,
                                           SeededRng& rng);

struct NoiseSequence {
  std::vector<Vector> eps_hats;
  std::vector<int> timesteps;  // attack_t, attack_t - m, ...
};

// Deterministic DDIM walk from attack_t downward with stride m, recording
// the predicted noise at each visited timestep. Exactly k model queries.
absl::StatusOr<NoiseSequence> CollectNoiseSequence(
    const NoiseSchedule& schedule, const NoisePredictor& model,
    const Vector& x_noisy, const AttackConfig& config);

// The aggregation metrics take the sequence as a set of >= 2 equal-dim
// vectors.
//
// Mean pairwise L1 distance over all k^2 ordered pairs (diagonal included).
absl::StatusOr<double> AggregationL1(std::span<const Vector> seq);
// Mean pairwise squared L2 distance over all k^2 ordered pairs.
absl::StatusOr<double> AggregationMse(std::span<const Vector> seq);
// Mean L2 distance to the centroid.
absl::StatusOr<double> AggregationCentroid(std::span<const Vector> seq);
// Mean of 1 / (nearest-neighbor distance + delta). Grows as points cluster.
absl::StatusOr<double> AggregationDensity(std::span<const Vector> seq,
                                          double delta);
// Intrinsic (k-1)-volume of the simplex on the k points,
// sqrt(det G) / (k-1)! with G the Gram matrix of edges from the first
// point. Affinely dependent points give 0.
absl::StatusOr<double> AggregationVolume(std::span<const Vector> seq);

absl::StatusOr<double> Aggregate(std::span<const Vector> seq,
                                 AggregationMetric metric, double delta);

// Maps an aggregate onto "smaller = tighter": identity for the dispersion
// metrics, reciprocal for density.
double OrientedDispersion(AggregationMetric metric, double aggregate);

// -log(c + delta); c >= 0.
double MembershipScore(double c_value, double delta);

// MembershipScore(OrientedDispersion(metric, aggregate), delta).
double ScoreFromAggregate(AggregationMetric metric, double aggregate,
                          double delta);

struct AttackResult {
  double score = 0.0;
  double aggregate = 0.0;
  std::uint64_t queries = 0;
  NoiseSequence sequence;
};

// inject -> collect -> aggregate -> score.
absl::StatusOr<AttackResult> AttackSample(const NoiseSchedule& schedule,
                                          const NoisePredictor& model,
                                          const Vector& x0,
                                          const AttackConfig& config,
                                          SeededRng& rng);

// Attack from an already-noised input; lets sweeps reuse one injection.
absl::StatusOr<AttackResult> AttackInjected(const NoiseSchedule& schedule,
                                            const NoisePredictor& model,
                                            const Vector& x_noisy,
                                            const AttackConfig& config);

}  // namespace dmia

#endif  // DMIA_ATTACK_H_
