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

#include "dmia/baselines.h"

#include <algorithm>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dmia/kernels.h"
#include "dmia/status.h"

namespace dmia {

absl::Status ValidateBaselineConfig(const BaselineConfig& config,
                                    const NoiseSchedule& schedule) {
  if (config.baseline_t < 1 || config.baseline_t > schedule.total_steps()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "baselines.baseline_t must be in [1, ", schedule.total_steps(),
        "], got ", config.baseline_t));
  }
  if (config.n_eps_draws < 1) {
    return absl::InvalidArgumentError("baselines.n_eps_draws must be >= 1");
  }
  if (config.secmi_num_steps < 1 || config.stride < 1) {
    return absl::InvalidArgumentError(
        "baselines.secmi_num_steps and baselines.stride must be >= 1");
  }
  if (config.secmi_t() > schedule.total_steps()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "SecMI path ends at t=", config.secmi_t(), " beyond the schedule (",
        schedule.total_steps(), " steps)"));
  }
  return absl::OkStatus();
}

absl::StatusOr<BaselineResult> NaiveLossScore(const NoiseSchedule& schedule,
                                              const NoisePredictor& model,
                                              const Vector& x0,
                                              const BaselineConfig& config,
                                              SeededRng& rng) {
  DMIA_RETURN_IF_ERROR(ValidateBaselineConfig(config, schedule));
  double total = 0.0;
  for (int i = 0; i < config.n_eps_draws; ++i) {
    DMIA_ASSIGN_OR_RETURN(Vector eps, GaussianVector(rng, x0.dim()));
    DMIA_ASSIGN_OR_RETURN(Vector xt,
                          ForwardNoise(schedule, x0, config.baseline_t, eps));
    DMIA_ASSIGN_OR_RETURN(Vector eps_hat,
                          model.PredictEps(xt, config.baseline_t));
    total += kernels::SquaredDistance(eps.values(), eps_hat.values());
  }
  return BaselineResult{-total / config.n_eps_draws,
                        static_cast<std::uint64_t>(config.n_eps_draws)};
}

absl::StatusOr<BaselineResult> SecmiScore(const NoiseSchedule& schedule,
                                          const NoisePredictor& model,
                                          const Vector& x0,
                                          const BaselineConfig& config) {
  DMIA_RETURN_IF_ERROR(ValidateBaselineConfig(config, schedule));
  std::uint64_t queries = 0;
  Vector x = x0;
  for (int step = 0; step < config.secmi_num_steps; ++step) {
    const int from = step * config.stride;
    // The clean endpoint t = 0 is queried at t = 1.
    DMIA_ASSIGN_OR_RETURN(Vector eps_hat,
                          model.PredictEps(x, std::max(from, 1)));
    ++queries;
    DMIA_ASSIGN_OR_RETURN(
        x, DdimForwardStep(schedule, x, from, eps_hat, from + config.stride));
  }
  const int t = config.secmi_t();
  const int back = t - config.stride;

  DMIA_ASSIGN_OR_RETURN(Vector eps_t, model.PredictEps(x, t));
  ++queries;
  DMIA_ASSIGN_OR_RETURN(Vector x0_hat, EstimateX0(schedule, x, t, eps_t));
  DMIA_ASSIGN_OR_RETURN(Vector x_back,
                        DdimReverseStep(schedule, x0_hat, eps_t, back));

  DMIA_ASSIGN_OR_RETURN(Vector eps_back,
                        model.PredictEps(x_back, std::max(back, 1)));
  ++queries;
  DMIA_ASSIGN_OR_RETURN(Vector x_round,
                        DdimForwardStep(schedule, x_back, back, eps_back, t));
  const double t_error = kernels::SquaredDistance(x_round.values(), x.values());
  return BaselineResult{-t_error, queries};
}

}  // namespace dmia
