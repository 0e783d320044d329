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

#include "dmia/denoiser.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "binary_io.h"
#include "dmia/kernels.h"
#include "dmia/status.h"
#include "spdlog/spdlog.h"

namespace dmia {
namespace {

inline double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double Silu(double z) { return z * Sigmoid(z); }

inline double SiluDerivative(double z) {
  const double s = Sigmoid(z);
  return s * (1.0 + z * (1.0 - s));
}

int SampleTimestep(SeededRng& rng, const NoiseSchedule& schedule,
                   int max_timestep) {
  const int upper = max_timestep > 0
                        ? std::min(max_timestep, schedule.total_steps())
                        : schedule.total_steps();
  return 1 + static_cast<int>(rng.NextBelow(static_cast<std::uint64_t>(upper)));
}

}  // namespace

absl::StatusOr<Vector> NoisePredictor::PredictEps(const Vector& xt,
                                                  int t) const {
  if (xt.dim() != input_dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "predictor expects dim ", input_dim(), ", got ", xt.dim()));
  }
  if (t < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("predictor timestep must be >= 1, got ", t));
  }
  query_count_.fetch_add(1, std::memory_order_relaxed);
  return Evaluate(xt, t);
}

double DifferentiablePredictor::Loss(const Vector& xt, int t,
                                     const Vector& eps) const {
  std::vector<double> scratch(parameters().size(), 0.0);
  return LossAndGradient(xt, t, eps, scratch);
}

void TimeEmbedding(int t, std::span<double> out) {
  const std::size_t half = out.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double freq =
        kTimeEmbeddingMaxFrequency *
        std::exp(-std::log(10000.0) * static_cast<double>(i) /
                 static_cast<double>(half));
    out[i] = std::sin(t * freq);
    out[half + i] = std::cos(t * freq);
  }
}

// Per-call activations. `acts[0]` is the network input; acts[l + 1] the
// output of layer l (post-activation for hidden layers, raw for the last).
struct MlpPredictor::Workspace {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> acts;
  std::vector<double> delta;
  std::vector<double> back;
};

MlpPredictor::MlpPredictor(std::size_t input_dim,
                           std::vector<std::size_t> hidden_dims)
    : input_dim_(input_dim), hidden_dims_(std::move(hidden_dims)) {
  std::size_t in = input_dim_ + kTimeEmbeddingDim;
  std::size_t offset = 0;
  auto add_layer = [&](std::size_t out) {
    layers_.push_back({in, out, offset, offset + in * out});
    offset += in * out + out;
    in = out;
  };
  for (std::size_t h : hidden_dims_) add_layer(h);
  add_layer(input_dim_);
  params_.assign(offset, 0.0);
}

absl::StatusOr<MlpPredictor> MlpPredictor::Create(
    std::size_t input_dim, std::vector<std::size_t> hidden_dims,
    SeededRng& rng) {
  if (input_dim == 0) {
    return absl::InvalidArgumentError("input_dim must be >= 1");
  }
  if (hidden_dims.empty()) {
    return absl::InvalidArgumentError("hidden_dims must not be empty");
  }
  for (std::size_t h : hidden_dims) {
    if (h == 0) return absl::InvalidArgumentError("hidden width must be >= 1");
  }
  MlpPredictor model(input_dim, std::move(hidden_dims));
  for (const LayerSlice& layer : model.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    const std::size_t end = layer.bias_offset + layer.out;
    for (std::size_t i = layer.weight_offset; i < end; ++i) {
      model.params_[i] = bound * (2.0 * rng.NextUniform() - 1.0);
    }
  }
  return model;
}

absl::StatusOr<MlpPredictor> MlpPredictor::FromParameters(
    std::size_t input_dim, std::vector<std::size_t> hidden_dims,
    std::vector<double> parameters) {
  if (input_dim == 0 || hidden_dims.empty() ||
      std::find(hidden_dims.begin(), hidden_dims.end(), 0) !=
          hidden_dims.end()) {
    return absl::InvalidArgumentError("invalid architecture");
  }
  MlpPredictor model(input_dim, std::move(hidden_dims));
  if (parameters.size() != model.params_.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", model.params_.size(), " parameters, got ",
                     parameters.size()));
  }
  model.params_ = std::move(parameters);
  return model;
}

void MlpPredictor::Forward(const Vector& xt, int t, Workspace& ws) const {
  const kernels::KernelTable& k = kernels::Active();
  const std::size_t n_layers = layers_.size();
  ws.pre.resize(n_layers);
  ws.acts.resize(n_layers + 1);
  ws.acts[0].resize(input_dim_ + kTimeEmbeddingDim);
  std::copy(xt.values().begin(), xt.values().end(), ws.acts[0].begin());
  TimeEmbedding(t, std::span<double>(ws.acts[0]).subspan(input_dim_));
  for (std::size_t l = 0; l < n_layers; ++l) {
    const LayerSlice& layer = layers_[l];
    std::vector<double>& z = ws.pre[l];
    z.resize(layer.out);
    k.gemv(params_.data() + layer.weight_offset, layer.out, layer.in,
           ws.acts[l].data(), params_.data() + layer.bias_offset, z.data());
    std::vector<double>& a = ws.acts[l + 1];
    a.resize(layer.out);
    if (l + 1 < n_layers) {
      for (std::size_t i = 0; i < layer.out; ++i) a[i] = Silu(z[i]);
    } else {
      std::copy(z.begin(), z.end(), a.begin());
    }
  }
}

Vector MlpPredictor::Evaluate(const Vector& xt, int t) const {
  thread_local Workspace ws;
  Forward(xt, t, ws);
  return Vector(ws.acts.back());
}

double MlpPredictor::Loss(const Vector& xt, int t, const Vector& eps) const {
  thread_local Workspace ws;
  Forward(xt, t, ws);
  return kernels::SquaredDistance(eps.values(), ws.acts.back());
}

double MlpPredictor::LossAndGradient(const Vector& xt, int t,
                                     const Vector& eps,
                                     std::span<double> grad) const {
  thread_local Workspace ws;
  Forward(xt, t, ws);
  const kernels::KernelTable& k = kernels::Active();
  const std::vector<double>& out = ws.acts.back();
  double loss = 0.0;
  ws.delta.resize(input_dim_);
  for (std::size_t i = 0; i < input_dim_; ++i) {
    const double r = out[i] - eps[i];
    loss += r * r;
    ws.delta[i] = 2.0 * r;
  }
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const LayerSlice& layer = layers_[l];
    k.rank1_accumulate(grad.data() + layer.weight_offset, layer.out, layer.in,
                       ws.delta.data(), ws.acts[l].data());
    k.axpy(1.0, ws.delta.data(), grad.data() + layer.bias_offset, layer.out);
    if (l == 0) break;
    ws.back.assign(layer.in, 0.0);
    k.gemv_transpose_accumulate(params_.data() + layer.weight_offset,
                                layer.out, layer.in, ws.delta.data(),
                                ws.back.data());
    const std::vector<double>& z_prev = ws.pre[l - 1];
    ws.delta.resize(layer.in);
    for (std::size_t i = 0; i < layer.in; ++i) {
      ws.delta[i] = ws.back[i] * SiluDerivative(z_prev[i]);
    }
  }
  return loss;
}

absl::StatusOr<double> TrainingLoss(const DifferentiablePredictor& model,
                                    const NoiseSchedule& schedule,
                                    std::span<const Vector> batch,
                                    SeededRng& rng, int max_timestep) {
  if (batch.empty()) {
    return absl::InvalidArgumentError("training_loss needs a non-empty batch");
  }
  double total = 0.0;
  for (const Vector& x0 : batch) {
    const int t = SampleTimestep(rng, schedule, max_timestep);
    DMIA_ASSIGN_OR_RETURN(Vector eps, GaussianVector(rng, x0.dim()));
    DMIA_ASSIGN_OR_RETURN(Vector xt, ForwardNoise(schedule, x0, t, eps));
    if (xt.dim() != model.input_dim()) {
      return absl::InvalidArgumentError("batch dimension mismatch");
    }
    total += model.Loss(xt, t, eps);
  }
  return total / static_cast<double>(batch.size());
}

absl::StatusOr<TrainResult> Train(MlpPredictor model,
                                  const NoiseSchedule& schedule,
                                  std::span<const Vector> member_data,
                                  const TrainConfig& config) {
  if (member_data.empty()) {
    return absl::InvalidArgumentError("training set is empty");
  }
  if (config.epochs < 1) {
    return absl::InvalidArgumentError("epochs must be >= 1");
  }
  if (config.batch_size == 0 || config.batch_size > member_data.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "batch_size must be in [1, ", member_data.size(), "], got ",
        config.batch_size));
  }
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    return absl::InvalidArgumentError("learning_rate must be finite and >= 0");
  }
  for (const Vector& x : member_data) {
    if (x.dim() != model.input_dim()) {
      return absl::InvalidArgumentError("member sample dimension mismatch");
    }
  }

  const kernels::KernelTable& k = kernels::Active();
  SeededRng shuffle_rng = SeededRng(config.seed, 0).Substream(1);
  SeededRng noise_rng = SeededRng(config.seed, 0).Substream(2);
  const bool momentum = config.optimizer == Optimizer::kMomentumSgd;
  TrainResult result{std::move(model), {}};
  MlpPredictor& m = result.model;
  std::span<double> params = m.mutable_parameters();
  std::vector<double> grad(params.size());
  std::vector<double> velocity(params.size(), 0.0);
  result.loss_trace.reserve(config.epochs);
  const std::size_t n = member_data.size();

  // Fixed (x_t, t, eps) probes: the trace is a deterministic function of
  // the parameters, so it only moves when training moves them.
  struct Probe {
    Vector xt;
    int t;
    Vector eps;
  };
  std::vector<Probe> probes;
  SeededRng probe_rng = SeededRng(config.seed, 0).Substream(3);
  for (std::size_t i = 0; i < std::min(n, kLossProbeCount); ++i) {
    const int t = SampleTimestep(probe_rng, schedule, config.max_timestep);
    DMIA_ASSIGN_OR_RETURN(Vector eps,
                          GaussianVector(probe_rng, member_data[i].dim()));
    DMIA_ASSIGN_OR_RETURN(Vector xt,
                          ForwardNoise(schedule, member_data[i], t, eps));
    probes.push_back({std::move(xt), t, std::move(eps)});
  }

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<std::size_t> order = Permutation(shuffle_rng, n);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const Vector& x0 = member_data[order[i]];
        const int t = SampleTimestep(noise_rng, schedule, config.max_timestep);
        DMIA_ASSIGN_OR_RETURN(Vector eps, GaussianVector(noise_rng, x0.dim()));
        DMIA_ASSIGN_OR_RETURN(Vector xt, ForwardNoise(schedule, x0, t, eps));
        epoch_loss += m.LossAndGradient(xt, t, eps, grad);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      if (momentum) {
        for (std::size_t p = 0; p < params.size(); ++p) {
          velocity[p] = config.momentum * velocity[p] + scale * grad[p];
        }
        k.axpy(-config.learning_rate, velocity.data(), params.data(),
               params.size());
      } else {
        k.axpy(-config.learning_rate * scale, grad.data(), params.data(),
               params.size());
      }
    }
    epoch_loss /= static_cast<double>(n);
    const bool finite_params =
        std::all_of(params.begin(), params.end(),
                    [](double v) { return std::isfinite(v); });
    double probe_loss = 0.0;
    if (finite_params) {
      for (const Probe& p : probes) probe_loss += m.Loss(p.xt, p.t, p.eps);
      probe_loss /= static_cast<double>(probes.size());
    }
    if (!std::isfinite(epoch_loss) || !finite_params ||
        !std::isfinite(probe_loss)) {
      return TrainingDivergedError(
          absl::StrCat("training diverged at epoch ", epoch + 1));
    }
    result.loss_trace.push_back(probe_loss);
    if ((epoch + 1) % 100 == 0) {
      spdlog::debug("epoch {} minibatch loss {:.6f} probe loss {:.6f}",
                    epoch + 1, epoch_loss, probe_loss);
    }
  }
  return result;
}

double GradientCheck(DifferentiablePredictor& model,
                     const NoiseSchedule& schedule, const Vector& x0,
                     SeededRng& rng) {
  std::span<double> params = model.mutable_parameters();
  if (params.empty()) return 0.0;
  const int t = SampleTimestep(rng, schedule, 0);
  const Vector eps = *GaussianVector(rng, x0.dim());
  const Vector xt = *ForwardNoise(schedule, x0, t, eps);

  std::vector<double> analytic(params.size(), 0.0);
  model.LossAndGradient(xt, t, eps, analytic);

  constexpr double kStep = 1e-5;
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + kStep;
    const double plus = model.Loss(xt, t, eps);
    params[p] = saved - kStep;
    const double minus = model.Loss(xt, t, eps);
    params[p] = saved;
    const double numeric = (plus - minus) / (2.0 * kStep);
    const double denom =
        std::max({std::fabs(analytic[p]), std::fabs(numeric), 1e-6});
    worst = std::max(worst, std::fabs(analytic[p] - numeric) / denom);
  }
  return worst;
}

namespace {
constexpr absl::string_view kCheckpointMagic = "DMIA";
}  // namespace

std::string EncodeCheckpoint(const MlpPredictor& model) {
  internal::ByteWriter w;
  w.Bytes(kCheckpointMagic);
  w.U16(kCheckpointVersion);
  w.U32(static_cast<std::uint32_t>(model.input_dim()));
  w.U32(static_cast<std::uint32_t>(kTimeEmbeddingDim));
  w.U32(static_cast<std::uint32_t>(model.hidden_dims().size()));
  for (std::size_t h : model.hidden_dims()) {
    w.U32(static_cast<std::uint32_t>(h));
  }
  w.U32(static_cast<std::uint32_t>(model.num_parameters()));
  for (double p : model.parameters()) w.F64(p);
  w.Crc32Trailer();
  return w.bytes();
}

absl::StatusOr<MlpPredictor> DecodeCheckpoint(absl::string_view bytes) {
  auto corrupt = [](std::size_t offset, absl::string_view why) {
    return absl::DataLossError(
        absl::StrCat("checkpoint corrupt at byte offset ", offset, ": ", why));
  };
  internal::ByteReader r(bytes);
  auto magic = r.Bytes(4);
  if (!magic || *magic != kCheckpointMagic) return corrupt(0, "bad magic");
  auto version = r.U16();
  if (!version) return corrupt(r.offset(), "truncated header");
  if (*version != kCheckpointVersion) {
    return corrupt(4, absl::StrCat("unsupported version ", *version,
                                   " (expected ", kCheckpointVersion, ")"));
  }
  DMIA_ASSIGN_OR_RETURN(absl::string_view payload,
                        internal::StripCrc32(bytes, "checkpoint"));
  r = internal::ByteReader(payload);
  r.Bytes(6);
  auto input_dim = r.U32();
  auto embed_dim = r.U32();
  auto n_hidden = r.U32();
  if (!n_hidden) return corrupt(r.offset(), "truncated architecture header");
  if (*input_dim == 0) return corrupt(6, "input_dim is 0");
  if (*embed_dim != kTimeEmbeddingDim) {
    return corrupt(10, absl::StrCat("time embedding dim ", *embed_dim));
  }
  if (*n_hidden == 0 || *n_hidden > 64) {
    return corrupt(14, absl::StrCat("hidden layer count ", *n_hidden));
  }
  std::vector<std::size_t> hidden;
  for (std::uint32_t i = 0; i < *n_hidden; ++i) {
    const std::size_t at = r.offset();
    auto h = r.U32();
    if (!h) return corrupt(at, "truncated hidden dims");
    if (*h == 0) return corrupt(at, "hidden width 0");
    hidden.push_back(*h);
  }
  const std::size_t count_at = r.offset();
  auto count = r.U32();
  if (!count) return corrupt(count_at, "truncated parameter count");
  if (r.remaining() != std::size_t{*count} * 8) {
    return corrupt(r.offset(),
                   absl::StrCat("expected ", *count, " parameters, found ",
                                r.remaining(), " bytes"));
  }
  std::vector<double> params(*count);
  for (double& p : params) p = *r.F64();
  auto model =
      MlpPredictor::FromParameters(*input_dim, std::move(hidden),
                                   std::move(params));
  if (!model.ok()) return corrupt(count_at, model.status().message());
  return model;
}

absl::Status SaveCheckpoint(const MlpPredictor& model,
                            const std::string& path) {
  return internal::WriteFile(path, EncodeCheckpoint(model));
}

absl::StatusOr<MlpPredictor> LoadCheckpoint(const std::string& path) {
  DMIA_ASSIGN_OR_RETURN(std::string bytes, internal::ReadFile(path));
  return DecodeCheckpoint(bytes);
}

}  // namespace dmia
