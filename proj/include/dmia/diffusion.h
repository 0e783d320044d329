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

#ifndef DMIA_DIFFUSION_H_
#define DMIA_DIFFUSION_H_

#include <vector>

#include "absl/status/statusor.h"
#include "dmia/numerics.h"

namespace dmia {

// Variance schedule with 1-based timesteps. Timestep 0 is a virtual "clean
// data" step with alpha_bar(0) == 1.
class NoiseSchedule {
 public:
  // Linear betas from beta_start to beta_end inclusive.
  // Requires 0 < beta_start <= beta_end < 1 and total_steps >= 2.
  static absl::StatusOr<NoiseSchedule> Linear(int total_steps,
                                              double beta_start,
                                              double beta_end);
  // Arbitrary betas; must be in (0, 1) and nondecreasing. Used by tests that
  // need a specific alpha_bar value.
  static absl::StatusOr<NoiseSchedule> FromBetas(std::vector<double> betas);

  int total_steps() const { return static_cast<int>(betas_.size()); }
  double beta(int t) const { return betas_[t - 1]; }
  double alpha(int t) const { return 1.0 - betas_[t - 1]; }
  // Defined for 0 <= t <= total_steps.
  double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bars_[t - 1]; }

  // Gate for every operation taking a timestep.
  absl::Status CheckTimestep(int t, int min_t) const;

 private:
  explicit NoiseSchedule(std::vector<double> betas);

  std::vector<double> betas_;
  std::vector<double> alpha_bars_;
};

inline constexpr int kDefaultTotalSteps = 1000;
inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;
inline constexpr double kDefaultAlphaBarFloor = 1e-8;

// sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps, 1 <= t <= T.
absl::StatusOr<Vector> ForwardNoise(const NoiseSchedule& schedule,
                                    const Vector& x0, int t, const Vector& eps);

// (x_t - sqrt(1 - alpha_bar_t) * eps_hat) / sqrt(alpha_bar_t). Accepts the
// virtual t = 0 (returns x_t). alpha_bar below `alpha_bar_floor` is a
// numeric-degenerate error.
absl::StatusOr<Vector> EstimateX0(const NoiseSchedule& schedule,
                                  const Vector& xt, int t,
                                  const Vector& eps_hat,
                                  double alpha_bar_floor = kDefaultAlphaBarFloor);

// Deterministic DDIM update with sigma = 0:
// sqrt(alpha_bar_target) * x0_hat + sqrt(1 - alpha_bar_target) * eps_hat.
absl::StatusOr<Vector> DdimReverseStep(const NoiseSchedule& schedule,
                                       const Vector& x0_hat,
                                       const Vector& eps_hat, int target_t);

// Deterministic DDIM inversion step from t to a later target_t: estimate x0
// from (xt, eps_hat), then re-noise it to target_t along eps_hat.
absl::StatusOr<Vector> DdimForwardStep(const NoiseSchedule& schedule,
                                       const Vector& xt, int t,
                                       const Vector& eps_hat, int target_t);

}  // namespace dmia

#endif  // DMIA_DIFFUSION_H_
