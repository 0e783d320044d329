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

#include "dmia/diffusion.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dmia/status.h"

namespace dmia {
namespace {

absl::Status CheckSameDim(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim() || a.dim() == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: ", a.dim(), " vs ", b.dim()));
  }
  return absl::OkStatus();
}

}  // namespace

NoiseSchedule::NoiseSchedule(std::vector<double> betas)
    : betas_(std::move(betas)) {
  alpha_bars_.reserve(betas_.size());
  double running = 1.0;
  for (double beta : betas_) {
    running *= 1.0 - beta;
    alpha_bars_.push_back(running);
  }
}

absl::StatusOr<NoiseSchedule> NoiseSchedule::Linear(int total_steps,
                                                    double beta_start,
                                                    double beta_end) {
  if (total_steps < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("total_steps must be >= 2, got ", total_steps));
  }
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need 0 < beta_start <= beta_end < 1, got beta_start=", beta_start,
        " beta_end=", beta_end));
  }
  std::vector<double> betas(total_steps);
  const double span = beta_end - beta_start;
  for (int i = 0; i < total_steps; ++i) {
    betas[i] = beta_start + span * static_cast<double>(i) /
                                static_cast<double>(total_steps - 1);
  }
  betas.back() = beta_end;
  return NoiseSchedule(std::move(betas));
}

absl::StatusOr<NoiseSchedule> NoiseSchedule::FromBetas(
    std::vector<double> betas) {
  if (betas.empty()) {
    return absl::InvalidArgumentError("schedule needs at least one beta");
  }
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0 && betas[i] < 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("beta[", i, "] outside (0, 1): ", betas[i]));
    }
    if (i > 0 && betas[i] < betas[i - 1]) {
      return absl::InvalidArgumentError(
          absl::StrCat("betas must be nondecreasing at index ", i));
    }
  }
  return NoiseSchedule(std::move(betas));
}

absl::Status NoiseSchedule::CheckTimestep(int t, int min_t) const {
  if (t < min_t || t > total_steps()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "timestep ", t, " outside [", min_t, ", ", total_steps(), "]"));
  }
  return absl::OkStatus();
}

absl::StatusOr<Vector> ForwardNoise(const NoiseSchedule& schedule,
                                    const Vector& x0, int t,
                                    const Vector& eps) {
  DMIA_RETURN_IF_ERROR(schedule.CheckTimestep(t, 1));
  DMIA_RETURN_IF_ERROR(CheckSameDim(x0, eps));
  const double ab = schedule.alpha_bar(t);
  return LinearCombination(std::sqrt(ab), x0, std::sqrt(1.0 - ab), eps);
}

absl::StatusOr<Vector> EstimateX0(const NoiseSchedule& schedule,
                                  const Vector& xt, int t,
                                  const Vector& eps_hat,
                                  double alpha_bar_floor) {
  DMIA_RETURN_IF_ERROR(schedule.CheckTimestep(t, 0));
  DMIA_RETURN_IF_ERROR(CheckSameDim(xt, eps_hat));
  const double ab = schedule.alpha_bar(t);
  if (ab < alpha_bar_floor) {
    return NumericDegenerateError(absl::StrCat(
        "alpha_bar(", t, ") = ", ab, " is below the floor ", alpha_bar_floor));
  }
  if (ab == 1.0) return xt;
  const double inv = 1.0 / std::sqrt(ab);
  return LinearCombination(inv, xt, -std::sqrt(1.0 - ab) * inv, eps_hat);
}

absl::StatusOr<Vector> DdimReverseStep(const NoiseSchedule& schedule,
                                       const Vector& x0_hat,
                                       const Vector& eps_hat, int target_t) {
  DMIA_RETURN_IF_ERROR(schedule.CheckTimestep(target_t, 0));
  DMIA_RETURN_IF_ERROR(CheckSameDim(x0_hat, eps_hat));
  if (target_t == 0) return x0_hat;
  const double ab = schedule.alpha_bar(target_t);
  return LinearCombination(std::sqrt(ab), x0_hat, std::sqrt(1.0 - ab),
                           eps_hat);
}

absl::StatusOr<Vector> DdimForwardStep(const NoiseSchedule& schedule,
                                       const Vector& xt, int t,
                                       const Vector& eps_hat, int target_t) {
  DMIA_RETURN_IF_ERROR(schedule.CheckTimestep(t, 0));
  if (target_t <= t) {
    return absl::InvalidArgumentError(absl::StrCat(
        "forward step needs target_t > t, got t=", t, " target_t=", target_t));
  }
  DMIA_ASSIGN_OR_RETURN(Vector x0_hat, EstimateX0(schedule, xt, t, eps_hat));
  return DdimReverseStep(schedule, x0_hat, eps_hat, target_t);
}

}  // namespace dmia
