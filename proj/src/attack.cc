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

#include "dmia/attack.h"

#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dmia/kernels.h"
#include "dmia/status.h"

namespace dmia {
namespace {

absl::Status CheckSequence(std::span<const Vector> seq) {
  if (seq.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("aggregation needs >= 2 vectors, got ", seq.size()));
  }
  const std::size_t dim = seq[0].dim();
  if (dim == 0) return absl::InvalidArgumentError("empty noise vector");
  for (const Vector& v : seq) {
    if (v.dim() != dim) {
      return absl::InvalidArgumentError("noise sequence dims differ");
    }
  }
  return absl::OkStatus();
}

double Factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

absl::StatusOr<InjectionMode> ParseInjectionMode(absl::string_view name) {
  if (name == "schedule") return InjectionMode::kSchedule;
  if (name == "direct") return InjectionMode::kDirect;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown injection mode '", name, "'"));
}

absl::string_view InjectionModeName(InjectionMode mode) {
  return mode == InjectionMode::kSchedule ? "schedule" : "direct";
}

absl::StatusOr<AggregationMetric> ParseAggregationMetric(
    absl::string_view name) {
  if (name == "l1") return AggregationMetric::kL1;
  if (name == "mse" || name == "l2") return AggregationMetric::kMse;
  if (name == "centroid") return AggregationMetric::kCentroid;
  if (name == "density") return AggregationMetric::kDensity;
  if (name == "volume") return AggregationMetric::kVolume;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown aggregation metric '", name, "'"));
}

absl::string_view AggregationMetricName(AggregationMetric metric) {
  switch (metric) {
    case AggregationMetric::kL1:
      return "l1";
    case AggregationMetric::kMse:
      return "mse";
    case AggregationMetric::kCentroid:
      return "centroid";
    case AggregationMetric::kDensity:
      return "density";
    case AggregationMetric::kVolume:
      return "volume";
  }
  return "unknown";
}

absl::Status ValidateAttackConfig(const AttackConfig& config,
                                  const NoiseSchedule& schedule) {
  if (config.k < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("attack.k must be >= 2, got ", config.k));
  }
  if (config.stride_m < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("attack.stride_m must be >= 1, got ", config.stride_m));
  }
  if (!(config.sigma > 0.0) || !std::isfinite(config.sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("attack.sigma must be > 0, got ", config.sigma));
  }
  if (!(config.delta > 0.0) || !std::isfinite(config.delta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("attack.delta must be > 0, got ", config.delta));
  }
  if (config.attack_t < 1 || config.attack_t > schedule.total_steps()) {
    return absl::InvalidArgumentError(
        absl::StrCat("attack.attack_t must be in [1, ", schedule.total_steps(),
                     "], got ", config.attack_t));
  }
  const int last = config.attack_t - (config.k - 1) * config.stride_m;
  if (last < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "attack.attack_t - (k - 1) * stride_m must be >= 1, got ", last));
  }
  return absl::OkStatus();
}

absl::StatusOr<InjectedSample> InjectNoise(const NoiseSchedule& schedule,
                                           const Vector& x0,
                                           const AttackConfig& config,
                                           SeededRng& rng) {
  DMIA_RETURN_IF_ERROR(ValidateAttackConfig(config, schedule));
  DMIA_ASSIGN_OR_RETURN(Vector eps, GaussianVector(rng, x0.dim()));
  if (config.injection_mode == InjectionMode::kSchedule) {
    DMIA_ASSIGN_OR_RETURN(Vector noisy,
                          ForwardNoise(schedule, x0, config.attack_t, eps));
    return InjectedSample{std::move(noisy), std::move(eps)};
  }
  Vector noisy = LinearCombination(1.0, x0, config.sigma, eps);
  return InjectedSample{std::move(noisy), std::move(eps)};
}

absl::StatusOr<NoiseSequence> CollectNoiseSequence(
    const NoiseSchedule& schedule, const NoisePredictor& model,
    const Vector& x_noisy, const AttackConfig& config) {
  DMIA_RETURN_IF_ERROR(ValidateAttackConfig(config, schedule));
  NoiseSequence seq;
  seq.eps_hats.reserve(config.k);
  seq.timesteps.reserve(config.k);
  Vector x = x_noisy;
  for (int i = 0; i < config.k; ++i) {
    const int t = config.attack_t - i * config.stride_m;
    DMIA_ASSIGN_OR_RETURN(Vector eps_hat, model.PredictEps(x, t));
    // The step after the last recorded prediction would go unused.
    if (i + 1 < config.k) {
      DMIA_ASSIGN_OR_RETURN(Vector x0_hat, EstimateX0(schedule, x, t, eps_hat));
      DMIA_ASSIGN_OR_RETURN(
          x, DdimReverseStep(schedule, x0_hat, eps_hat, t - config.stride_m));
    }
    seq.eps_hats.push_back(std::move(eps_hat));
    seq.timesteps.push_back(t);
  }
  return seq;
}

absl::StatusOr<double> AggregationL1(std::span<const Vector> seq) {
  DMIA_RETURN_IF_ERROR(CheckSequence(seq));
  double sum = 0.0;
  for (const Vector& a : seq) {
    for (const Vector& b : seq) sum += kernels::L1Distance(a.values(), b.values());
  }
  const double k = static_cast<double>(seq.size());
  return sum / (k * k);
}

absl::StatusOr<double> AggregationMse(std::span<const Vector> seq) {
  DMIA_RETURN_IF_ERROR(CheckSequence(seq));
  double sum = 0.0;
  for (const Vector& a : seq) {
    for (const Vector& b : seq) {
      sum += kernels::SquaredDistance(a.values(), b.values());
    }
  }
  const double k = static_cast<double>(seq.size());
  return sum / (k * k);
}

absl::StatusOr<double> AggregationCentroid(std::span<const Vector> seq) {
  DMIA_RETURN_IF_ERROR(CheckSequence(seq));
  const double inv_k = 1.0 / static_cast<double>(seq.size());
  Vector centroid = Vector::Zeros(seq[0].dim());
  for (const Vector& v : seq) {
    kernels::Axpy(inv_k, v.values(), centroid.mutable_values());
  }
  double sum = 0.0;
  for (const Vector& v : seq) {
    sum += std::sqrt(kernels::SquaredDistance(v.values(), centroid.values()));
  }
  return sum * inv_k;
}

absl::StatusOr<double> AggregationDensity(std::span<const Vector> seq,
                                          double delta) {
  DMIA_RETURN_IF_ERROR(CheckSequence(seq));
  double sum = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < seq.size(); ++j) {
      if (i == j) continue;
      nearest = std::min(nearest, kernels::SquaredDistance(seq[i].values(),
                                                           seq[j].values()));
    }
    sum += 1.0 / (std::sqrt(nearest) + delta);
  }
  return sum / static_cast<double>(seq.size());
}

absl::StatusOr<double> AggregationVolume(std::span<const Vector> seq) {
  DMIA_RETURN_IF_ERROR(CheckSequence(seq));
  const std::size_t n = seq.size() - 1;
  std::vector<Vector> edges;
  edges.reserve(n);
  for (std::size_t i = 1; i < seq.size(); ++i) {
    edges.push_back(LinearCombination(1.0, seq[i], -1.0, seq[0]));
  }
  Matrix gram(n, n);
  double diag_product = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double g = kernels::Dot(edges[i].values(), edges[j].values());
      gram(i, j) = g;
      gram(j, i) = g;
    }
    diag_product *= gram(i, i);
  }
  if (diag_product == 0.0) return 0.0;
  DMIA_ASSIGN_OR_RETURN(double det, Determinant(gram));
  // Hadamard: 0 <= det G <= prod diag G. A ratio near rounding level means
  // the points are affinely dependent.
  constexpr double kRelativeFloor = 1e-12;
  if (det <= kRelativeFloor * diag_product) return 0.0;
  return std::sqrt(det) / Factorial(n);
}

absl::StatusOr<double> Aggregate(std::span<const Vector> seq,
                                 AggregationMetric metric, double delta) {
  switch (metric) {
    case AggregationMetric::kL1:
      return AggregationL1(seq);
    case AggregationMetric::kMse:
      return AggregationMse(seq);
    case AggregationMetric::kCentroid:
      return AggregationCentroid(seq);
    case AggregationMetric::kDensity:
      return AggregationDensity(seq, delta);
    case AggregationMetric::kVolume:
      return AggregationVolume(seq);
  }
  return absl::InvalidArgumentError("unknown metric");
}

double OrientedDispersion(AggregationMetric metric, double aggregate) {
  return metric == AggregationMetric::kDensity ? 1.0 / aggregate : aggregate;
}

double MembershipScore(double c_value, double delta) {
  return -std::log(c_value + delta);
}

double ScoreFromAggregate(AggregationMetric metric, double aggregate,
                          double delta) {
  return MembershipScore(OrientedDispersion(metric, aggregate), delta);
}

absl::StatusOr<AttackResult> AttackInjected(const NoiseSchedule& schedule,
                                            const NoisePredictor& model,
                                            const Vector& x_noisy,
                                            const AttackConfig& config) {
  AttackResult result;
  DMIA_ASSIGN_OR_RETURN(result.sequence,
                        CollectNoiseSequence(schedule, model, x_noisy, config));
  result.queries = result.sequence.eps_hats.size();
  DMIA_ASSIGN_OR_RETURN(
      result.aggregate,
      Aggregate(result.sequence.eps_hats, config.metric, config.delta));
  result.score =
      ScoreFromAggregate(config.metric, result.aggregate, config.delta);
  return result;
}

absl::StatusOr<AttackResult> AttackSample(const NoiseSchedule& schedule,
                                          const NoisePredictor& model,
                                          const Vector& x0,
                                          const AttackConfig& config,
                                          SeededRng& rng) {
  DMIA_ASSIGN_OR_RETURN(InjectedSample injected,
                        InjectNoise(schedule, x0, config, rng));
  return AttackInjected(schedule, model, injected.noisy, config);
}

}  // namespace dmia
