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

#ifndef DMIA_BASELINES_H_
#define DMIA_BASELINES_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "dmia/denoiser.h"
#include "dmia/diffusion.h"
#include "dmia/numerics.h"

namespace dmia {

struct BaselineConfig {
  // NaiveLoss timestep.
  int baseline_t = 80;
  // Noise draws averaged by NaiveLoss (one query each).
  int n_eps_draws = 1;
  // SecMI-style: DDIM inversion from x0 to secmi_num_steps * stride, then a
  // one-stride denoise/re-noise round trip there.
  int secmi_num_steps = 10;
  int stride = 10;

  int secmi_t() const { return secmi_num_steps * stride; }
};

absl::Status ValidateBaselineConfig(const BaselineConfig& config,
                                    const NoiseSchedule& schedule);

struct BaselineResult {
  double score = 0.0;  // larger = more member-like
  std::uint64_t queries = 0;
};

// Negated mean of ||eps - eps_theta(x_t, t)||^2 at baseline_t over
// n_eps_draws noise draws.
absl::StatusOr<BaselineResult> NaiveLossScore(const NoiseSchedule& schedule,
                                              const NoisePredictor& model,
                                              const Vector& x0,
                                              const BaselineConfig& config,
                                              SeededRng& rng);

// Negated t-error: deterministic DDIM inversion of x0 to t = secmi_t
// (secmi_num_steps queries), one reverse step to t - stride and one
// forward step back to t (2 queries), then -||x_t' - x_t||^2.
absl::StatusOr<BaselineResult> SecmiScore(const NoiseSchedule& schedule,
                                          const NoisePredictor& model,
                                          const Vector& x0,
                                          const BaselineConfig& config);

}  // namespace dmia

#endif  // DMIA_BASELINES_H_
