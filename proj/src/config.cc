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


#include "dmia/config.h"

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "binary_io.h"
#include "dmia/status.h"

namespace dmia {
namespace {

using Json = nlohmann::json;

absl::Status FieldError(absl::string_view field, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(field, ": ", what));
}

// Reads the keys of one JSON object, remembering which were consumed so
// leftovers (typos) can be reported with their full dotted name.
class Section {
 public:
  Section(const Json* j, std::string prefix)
      : j_(j), prefix_(std::move(prefix)) {}

  std::string Field(absl::string_view key) const {
    return prefix_.empty() ? std::string(key) : absl::StrCat(prefix_, ".", key);
  }

  bool Has(const std::string& key) const {
    return j_ != nullptr && j_->contains(key);
  }

  template <typename T>
  absl::Status Get(const std::string& key, T& out) {
    if (!Has(key)) return absl::OkStatus();
    seen_.insert(key);
    const Json& v = j_->at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) return FieldError(Field(key), "expected a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) {
        return FieldError(Field(key), "expected a non-negative integer");
      }
      out = v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        return FieldError(Field(key), "expected an integer");
      }
      out = v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) return FieldError(Field(key), "expected a number");
      out = v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) return FieldError(Field(key), "expected a string");
      out = v.get<std::string>();
    } else {
      // Vectors of numbers.
      using Elem = typename T::value_type;
      if (!v.is_array()) return FieldError(Field(key), "expected an array");
      T values;
      for (const Json& e : v) {
        const bool ok = std::is_integral_v<Elem> ? e.is_number_unsigned()
                                                 : e.is_number();
        if (!ok) {
          return FieldError(Field(key), std::is_integral_v<Elem>
                                            ? "expected non-negative integers"
                                            : "expected numbers");
        }
        values.push_back(e.get<Elem>());
      }
      out = std::move(values);
    }
    return absl::OkStatus();
  }

  // Nested object; absent means all defaults.
  absl::StatusOr<Section> Child(const std::string& key) {
    if (!Has(key)) return Section(nullptr, Field(key));
    seen_.insert(key);
    const Json& v = j_->at(key);
    if (!v.is_object()) return FieldError(Field(key), "expected an object");
    return Section(&v, Field(key));
  }

  absl::Status CheckNoUnknownKeys() const {
    if (j_ == nullptr) return absl::OkStatus();
    for (const auto& [key, unused] : j_->items()) {
      if (!seen_.contains(key)) return FieldError(Field(key), "unknown field");
    }
    return absl::OkStatus();
  }

 private:
  const Json* j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

constexpr absl::string_view kPlainSgd = "sgd";
constexpr absl::string_view kMomentumSgd = "momentum-sgd";

absl::string_view OptimizerName(Optimizer o) {
  return o == Optimizer::kPlainSgd ? kPlainSgd : kMomentumSgd;
}

absl::Status ParseSections(const Json& j, RunConfig& c) {
  if (!j.is_object()) return FieldError("<root>", "expected a JSON object");
  Section root(&j, "");
  DMIA_RETURN_IF_ERROR(root.Get("master_seed", c.master_seed));
  DMIA_RETURN_IF_ERROR(root.Get("output_dir", c.output_dir));
  DMIA_RETURN_IF_ERROR(root.Get("parallel", c.parallel));

  DMIA_ASSIGN_OR_RETURN(Section ds, root.Child("dataset"));
  std::string kind(SyntheticKindName(c.dataset.kind));
  DMIA_RETURN_IF_ERROR(ds.Get("kind", kind));
  auto parsed_kind = ParseSyntheticKind(kind);
  if (!parsed_kind.ok()) {
    return FieldError(ds.Field("kind"), parsed_kind.status().message());
  }
  c.dataset.kind = *parsed_kind;
  DMIA_RETURN_IF_ERROR(ds.Get("count", c.dataset.count));
  DMIA_RETURN_IF_ERROR(ds.Get("member_fraction", c.dataset.member_fraction));
  DMIA_RETURN_IF_ERROR(ds.CheckNoUnknownKeys());

  DMIA_ASSIGN_OR_RETURN(Section sc, root.Child("schedule"));
  DMIA_RETURN_IF_ERROR(sc.Get("total_steps", c.schedule.total_steps));
  DMIA_RETURN_IF_ERROR(sc.Get("beta_start", c.schedule.beta_start));
  DMIA_RETURN_IF_ERROR(sc.Get("beta_end", c.schedule.beta_end));
  DMIA_RETURN_IF_ERROR(sc.CheckNoUnknownKeys());

  DMIA_ASSIGN_OR_RETURN(Section md, root.Child("model"));
  DMIA_RETURN_IF_ERROR(md.Get("hidden_dims", c.model.hidden_dims));
  DMIA_RETURN_IF_ERROR(md.CheckNoUnknownKeys());

  DMIA_ASSIGN_OR_RETURN(Section tr, root.Child("train"));
  DMIA_RETURN_IF_ERROR(tr.Get("epochs", c.train.epochs));
  DMIA_RETURN_IF_ERROR(tr.Get("batch_size", c.train.batch_size));
  DMIA_RETURN_IF_ERROR(tr.Get("learning_rate", c.train.learning_rate));
  DMIA_RETURN_IF_ERROR(tr.Get("momentum", c.train.momentum));
  DMIA_RETURN_IF_ERROR(tr.Get("max_timestep", c.train.max_timestep));
  std::string optimizer(OptimizerName(c.train.optimizer));
  DMIA_RETURN_IF_ERROR(tr.Get("optimizer", optimizer));
  if (optimizer == kPlainSgd) {
    c.train.optimizer = Optimizer::kPlainSgd;
  } else if (optimizer == kMomentumSgd) {
    c.train.optimizer = Optimizer::kMomentumSgd;
  } else {
    return FieldError(tr.Field("optimizer"),
                      absl::StrCat("unknown optimizer '", optimizer,
                                   "' (sgd | momentum-sgd)"));
  }
  DMIA_RETURN_IF_ERROR(tr.CheckNoUnknownKeys());

  DMIA_ASSIGN_OR_RETURN(Section at, root.Child("attack"));
  DMIA_RETURN_IF_ERROR(at.Get("attack_t", c.attack.attack_t));
  DMIA_RETURN_IF_ERROR(at.Get("k", c.attack.k));
  DMIA_RETURN_IF_ERROR(at.Get("stride_m", c.attack.stride_m));
  DMIA_RETURN_IF_ERROR(at.Get("sigma", c.attack.sigma));
  DMIA_RETURN_IF_ERROR(at.Get("delta", c.attack.delta));
  std::string mode(InjectionModeName(c.attack.injection_mode));
  DMIA_RETURN_IF_ERROR(at.Get("injection_mode", mode));
  auto parsed_mode = ParseInjectionMode(mode);
  if (!parsed_mode.ok()) {
    return FieldError(at.Field("injection_mode"),
                      parsed_mode.status().message());
  }
  c.attack.injection_mode = *parsed_mode;
  std::string metric(AggregationMetricName(c.attack.metric));
  DMIA_RETURN_IF_ERROR(at.Get("metric", metric));
  auto parsed_metric = ParseAggregationMetric(metric);
  if (!parsed_metric.ok()) {
    return FieldError(at.Field("metric"), parsed_metric.status().message());
  }
  c.attack.metric = *parsed_metric;
  DMIA_RETURN_IF_ERROR(at.CheckNoUnknownKeys());

  DMIA_ASSIGN_OR_RETURN(Section bl, root.Child("baselines"));
  DMIA_RETURN_IF_ERROR(bl.Get("naive_loss", c.baselines.naive_loss));
  DMIA_RETURN_IF_ERROR(bl.Get("secmi", c.baselines.secmi));
  c.baselines.config.baseline_t = c.attack.attack_t;
  DMIA_RETURN_IF_ERROR(bl.Get("baseline_t", c.baselines.config.baseline_t));
  DMIA_RETURN_IF_ERROR(bl.Get("n_eps_draws", c.baselines.config.n_eps_draws));
  DMIA_RETURN_IF_ERROR(
      bl.Get("secmi_num_steps", c.baselines.config.secmi_num_steps));
  DMIA_RETURN_IF_ERROR(bl.Get("stride", c.baselines.config.stride));
  DMIA_RETURN_IF_ERROR(bl.CheckNoUnknownKeys());

  DMIA_ASSIGN_OR_RETURN(Section ev, root.Child("eval"));
  DMIA_RETURN_IF_ERROR(ev.Get("fpr_targets", c.eval.fpr_targets));
  DMIA_RETURN_IF_ERROR(ev.Get("histogram_bins", c.eval.histogram_bins));
  DMIA_RETURN_IF_ERROR(ev.CheckNoUnknownKeys());

  return root.CheckNoUnknownKeys();
}

}  // namespace

absl::StatusOr<RunConfig> ConfigFromJson(const nlohmann::json& j) {
  RunConfig config;
  DMIA_RETURN_IF_ERROR(ParseSections(j, config));
  return config;
}

absl::StatusOr<RunConfig> LoadConfig(const std::string& path) {
  DMIA_ASSIGN_OR_RETURN(std::string text, internal::ReadFile(path));
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config: ", path, " is not valid JSON"));
  }
  return ConfigFromJson(j);
}

nlohmann::json ConfigToJson(const RunConfig& c) {
  return Json{
      {"master_seed", c.master_seed},
      {"output_dir", c.output_dir},
      {"parallel", c.parallel},
      {"dataset",
       {{"kind", SyntheticKindName(c.dataset.kind)},
        {"count", c.dataset.count},
        {"member_fraction", c.dataset.member_fraction}}},
      {"schedule",
       {{"total_steps", c.schedule.total_steps},
        {"beta_start", c.schedule.beta_start},
        {"beta_end", c.schedule.beta_end}}},
      {"model", {{"hidden_dims", c.model.hidden_dims}}},
      {"train",
       {{"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"learning_rate", c.train.learning_rate},
        {"optimizer", OptimizerName(c.train.optimizer)},
        {"momentum", c.train.momentum},
        {"max_timestep", c.train.max_timestep}}},
      {"attack",
       {{"attack_t", c.attack.attack_t},
        {"k", c.attack.k},
        {"stride_m", c.attack.stride_m},
        {"sigma", c.attack.sigma},
        {"injection_mode", InjectionModeName(c.attack.injection_mode)},
        {"metric", AggregationMetricName(c.attack.metric)},
        {"delta", c.attack.delta}}},
      {"baselines",
       {{"naive_loss", c.baselines.naive_loss},
        {"secmi", c.baselines.secmi},
        {"baseline_t", c.baselines.config.baseline_t},
        {"n_eps_draws", c.baselines.config.n_eps_draws},
        {"secmi_num_steps", c.baselines.config.secmi_num_steps},
        {"stride", c.baselines.config.stride}}},
      {"eval",
       {{"fpr_targets", c.eval.fpr_targets},
        {"histogram_bins", c.eval.histogram_bins}}},
  };
}

absl::Status ValidateConfig(const RunConfig& c) {
  auto positive = [](absl::string_view field, double v) -> absl::Status {
    if (!(v > 0.0) || !std::isfinite(v)) {
      return FieldError(field, absl::StrCat("must be > 0 (got ", v, ")"));
    }
    return absl::OkStatus();
  };
  auto at_least = [](absl::string_view field, long long v,
                     long long lo) -> absl::Status {
    if (v < lo) {
      return FieldError(field,
                        absl::StrCat("must be >= ", lo, " (got ", v, ")"));
    }
    return absl::OkStatus();
  };
  auto at_most = [](absl::string_view field, long long v, long long hi,
                    absl::string_view bound) -> absl::Status {
    if (v > hi) {
      return FieldError(field, absl::StrCat("must be <= ", bound, " = ", hi,
                                            " (got ", v, ")"));
    }
    return absl::OkStatus();
  };

  if (c.output_dir.empty()) return FieldError("output_dir", "must be set");

  const auto count = static_cast<long long>(c.dataset.count);
  DMIA_RETURN_IF_ERROR(at_least("dataset.count", count, 2));
  const double f = c.dataset.member_fraction;
  if (!(f > 0.0 && f < 1.0)) {
    return FieldError("dataset.member_fraction",
                      absl::StrCat("must lie in (0, 1) (got ", f, ")"));
  }
  const auto members = static_cast<long long>(std::llround(f * count));
  if (members < 1 || members > count - 1) {
    return FieldError("dataset.member_fraction",
                      absl::StrCat("leaves one side of the split empty (",
                                   members, " of ", count, " members)"));
  }

  const int T = c.schedule.total_steps;
  DMIA_RETURN_IF_ERROR(at_least("schedule.total_steps", T, 2));
  DMIA_RETURN_IF_ERROR(positive("schedule.beta_start", c.schedule.beta_start));
  if (!(c.schedule.beta_end >= c.schedule.beta_start &&
        c.schedule.beta_end < 1.0)) {
    return FieldError("schedule.beta_end",
                      absl::StrCat("must lie in [beta_start, 1) (got ",
                                   c.schedule.beta_end, ")"));
  }

  if (c.model.hidden_dims.empty()) {
    return FieldError("model.hidden_dims", "must be non-empty");
  }
  for (std::size_t h : c.model.hidden_dims) {
    if (h == 0) return FieldError("model.hidden_dims", "widths must be >= 1");
  }

  DMIA_RETURN_IF_ERROR(at_least("train.epochs", c.train.epochs, 1));
  DMIA_RETURN_IF_ERROR(at_least(
      "train.batch_size", static_cast<long long>(c.train.batch_size), 1));
  DMIA_RETURN_IF_ERROR(at_most("train.batch_size",
                               static_cast<long long>(c.train.batch_size),
                               members, "member count"));
  DMIA_RETURN_IF_ERROR(
      positive("train.learning_rate", c.train.learning_rate));
  if (!(c.train.momentum >= 0.0 && c.train.momentum < 1.0)) {
    return FieldError("train.momentum",
                      absl::StrCat("must lie in [0, 1) (got ",
                                   c.train.momentum, ")"));
  }
  DMIA_RETURN_IF_ERROR(at_least("train.max_timestep", c.train.max_timestep, 0));
  DMIA_RETURN_IF_ERROR(at_most("train.max_timestep", c.train.max_timestep, T,
                               "schedule.total_steps"));

  const AttackConfig& a = c.attack;
  DMIA_RETURN_IF_ERROR(at_least("attack.k", a.k, 2));
  DMIA_RETURN_IF_ERROR(at_least("attack.stride_m", a.stride_m, 1));
  DMIA_RETURN_IF_ERROR(at_most("attack.attack_t", a.attack_t, T,
                               "schedule.total_steps"));
  const long long last = a.attack_t - static_cast<long long>(a.k - 1) *
                                          a.stride_m;
  if (last < 1) {
    return FieldError(
        "attack.attack_t",
        absl::StrCat("attack_t - (k - 1) * stride_m must be >= 1 (got ",
                     last, ")"));
  }
  DMIA_RETURN_IF_ERROR(positive("attack.sigma", a.sigma));
  DMIA_RETURN_IF_ERROR(positive("attack.delta", a.delta));

  const BaselineConfig& b = c.baselines.config;
  if (c.baselines.naive_loss) {
    DMIA_RETURN_IF_ERROR(at_least("baselines.baseline_t", b.baseline_t, 1));
    DMIA_RETURN_IF_ERROR(at_most("baselines.baseline_t", b.baseline_t, T,
                                 "schedule.total_steps"));
    DMIA_RETURN_IF_ERROR(
        at_least("baselines.n_eps_draws", b.n_eps_draws, 1));
  }
  if (c.baselines.secmi) {
    DMIA_RETURN_IF_ERROR(
        at_least("baselines.secmi_num_steps", b.secmi_num_steps, 1));
    DMIA_RETURN_IF_ERROR(at_least("baselines.stride", b.stride, 1));
    const long long secmi_t =
        static_cast<long long>(b.secmi_num_steps) * b.stride;
    if (secmi_t > T) {
      return FieldError(
          "baselines.secmi_num_steps",
          absl::StrCat("secmi_num_steps * stride must be <= "
                       "schedule.total_steps = ", T, " (got ", secmi_t, ")"));
    }
  }

  if (c.eval.fpr_targets.empty()) {
    return FieldError("eval.fpr_targets", "must be non-empty");
  }
  for (double fpr : c.eval.fpr_targets) {
    if (!(fpr > 0.0 && fpr <= 1.0)) {
      return FieldError("eval.fpr_targets",
                        absl::StrCat("targets must lie in (0, 1] (got ", fpr,
                                     ")"));
    }
  }
  return at_least("eval.histogram_bins", c.eval.histogram_bins, 1);
}

std::string ConfigHash(const RunConfig& config) {
  Json j = ConfigToJson(config);
  j.erase("output_dir");
  j.erase("parallel");
  const std::string canonical = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", h);
}

absl::StatusOr<NoiseSchedule> BuildSchedule(const RunConfig& config) {
  return NoiseSchedule::Linear(config.schedule.total_steps,
                               config.schedule.beta_start,
                               config.schedule.beta_end);
}

}  // namespace dmia
