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

#ifndef DMIA_DENOISER_H_
#define DMIA_DENOISER_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dmia/diffusion.h"
#include "dmia/numerics.h"

namespace dmia {

// Anything that answers eps_theta(x_t, t) queries. The query counter is the
// only state a query may touch; it is atomic so parallel attack workers can
// share one model.
class NoisePredictor {
 public:
  NoisePredictor() = default;
  NoisePredictor(const NoisePredictor& other)
      : query_count_(other.query_count()) {}
  NoisePredictor(NoisePredictor&& other) noexcept
      : query_count_(other.query_count()) {}
  NoisePredictor& operator=(const NoisePredictor& other) {
    query_count_.store(other.query_count(), std::memory_order_relaxed);
    return *this;
  }
  NoisePredictor& operator=(NoisePredictor&& other) noexcept {
    query_count_.store(other.query_count(), std::memory_order_relaxed);
    return *this;
  }
  virtual ~NoisePredictor() = default;

  virtual std::size_t input_dim() const = 0;

  // Validates shape and t >= 1, counts exactly one query, then evaluates.
  absl::StatusOr<Vector> PredictEps(const Vector& xt, int t) const;

  std::uint64_t query_count() const {
    return query_count_.load(std::memory_order_relaxed);
  }

 protected:
  virtual Vector Evaluate(const Vector& xt, int t) const = 0;

 private:
  mutable std::atomic<std::uint64_t> query_count_{0};
};

// A predictor with a flat parameter vector and an analytic gradient of the
// per-sample denoising loss ||eps - eps_theta(x_t, t)||^2.
class DifferentiablePredictor : public NoisePredictor {
 public:
  virtual std::span<const double> parameters() const = 0;
  virtual std::span<double> mutable_parameters() = 0;

  // Returns the loss and adds its gradient to `grad` (same size as
  // parameters()). Does not count as a query.
  virtual double LossAndGradient(const Vector& xt, int t, const Vector& eps,
                                 std::span<double> grad) const = 0;

  // Loss only; does not count as a query.
  virtual double Loss(const Vector& xt, int t, const Vector& eps) const;
};

inline constexpr std::size_t kTimeEmbeddingDim = 16;
// Highest angular frequency (radians per timestep) of the embedding. Kept
// well below pi / stride so timesteps a DDIM stride apart embed close
// together.
inline constexpr double kTimeEmbeddingMaxFrequency = 0.1;

// Fully connected eps-network: [x, sinusoidal(t)] -> SiLU hidden layers ->
// linear output of input_dim.
class MlpPredictor final : public DifferentiablePredictor {
 public:
  // Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static absl::StatusOr<MlpPredictor> Create(std::size_t input_dim,
                                             std::vector<std::size_t> hidden_dims,
                                             SeededRng& rng);
  // Shape-checked construction from raw parameters (checkpoint loading).
  static absl::StatusOr<MlpPredictor> FromParameters(
      std::size_t input_dim, std::vector<std::size_t> hidden_dims,
      std::vector<double> parameters);

  std::size_t input_dim() const override { return input_dim_; }
  const std::vector<std::size_t>& hidden_dims() const { return hidden_dims_; }
  std::size_t num_parameters() const { return params_.size(); }

  std::span<const double> parameters() const override { return params_; }
  std::span<double> mutable_parameters() override { return params_; }

  double LossAndGradient(const Vector& xt, int t, const Vector& eps,
                         std::span<double> grad) const override;
  double Loss(const Vector& xt, int t, const Vector& eps) const override;

  // Parameter range [begin, end) of each dense layer (weights then bias).
  struct LayerSlice {
    std::size_t in;
    std::size_t out;
    std::size_t weight_offset;
    std::size_t bias_offset;
  };
  const std::vector<LayerSlice>& layers() const { return layers_; }

 protected:
  Vector Evaluate(const Vector& xt, int t) const override;

 private:
  MlpPredictor(std::size_t input_dim, std::vector<std::size_t> hidden_dims);

  struct Workspace;
  void Forward(const Vector& xt, int t, Workspace& ws) const;

  std::size_t input_dim_;
  std::vector<std::size_t> hidden_dims_;
  std::vector<LayerSlice> layers_;
  std::vector<double> params_;
};

// Sinusoidal timestep encoding, half sines and half cosines.
void TimeEmbedding(int t, std::span<double> out);

enum class Optimizer { kPlainSgd, kMomentumSgd };

struct TrainConfig {
  int epochs = 2000;
  std::size_t batch_size = 64;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kMomentumSgd;
  double momentum = 0.9;
  // Training timesteps are drawn uniformly from [1, max_timestep]; 0 means
  // the whole schedule.
  int max_timestep = 0;
};

// Mean over the batch of ||eps - eps_theta(x_t, t)||^2 with (t, eps) drawn
// from rng; t is uniform on [1, max_timestep] (0 = whole schedule).
absl::StatusOr<double> TrainingLoss(const DifferentiablePredictor& model,
                                    const NoiseSchedule& schedule,
                                    std::span<const Vector> batch,
                                    SeededRng& rng, int max_timestep = 0);

// Members (from the front of the training set) probed for the loss trace.
inline constexpr std::size_t kLossProbeCount = 64;

struct TrainResult {
  MlpPredictor model;
  // After each epoch: mean loss on up to kLossProbeCount members, each with
  // one (t, eps) draw fixed for the whole run.
  std::vector<double> loss_trace;
};

// Minibatch SGD on the denoising loss. Non-finite loss or parameters abort
// with a training-diverged error naming the epoch.
absl::StatusOr<TrainResult> Train(MlpPredictor model,
                                  const NoiseSchedule& schedule,
                                  std::span<const Vector> member_data,
                                  const TrainConfig& config);

// Max relative error between analytic and central-difference (step 1e-5)
// gradients at one (t, eps) draw. Zero-parameter models give 0.
// Relative error is |a - n| / max(|a|, |n|, 1e-6).
double GradientCheck(DifferentiablePredictor& model,
                     const NoiseSchedule& schedule, const Vector& x0,
                     SeededRng& rng);

inline constexpr std::uint16_t kCheckpointVersion = 1;

absl::Status SaveCheckpoint(const MlpPredictor& model,
                            const std::string& path);
absl::StatusOr<MlpPredictor> LoadCheckpoint(const std::string& path);

std::string EncodeCheckpoint(const MlpPredictor& model);
absl::StatusOr<MlpPredictor> DecodeCheckpoint(absl::string_view bytes);

}  // namespace dmia

#endif  // DMIA_DENOISER_H_
