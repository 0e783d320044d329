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

#include "dmia/kernels.h"

#include <atomic>
#include <cstdlib>
#include <string>

#include "spdlog/spdlog.h"

namespace dmia::kernels {

#ifdef DMIA_HAVE_AVX2
const KernelTable& Avx2KernelTable();
#endif

namespace {

const KernelTable* FromName(absl::string_view name) {
  if (name == "scalar") return &ScalarKernels();
  if (name == "avx2") return Avx2Kernels();
  if (name == "auto") {
    const KernelTable* avx2 = Avx2Kernels();
    return avx2 != nullptr ? avx2 : &ScalarKernels();
  }
  return nullptr;
}

const KernelTable* InitialBackend() {
  const char* env = std::getenv("DMIA_SIMD");
  const std::string requested = env != nullptr ? env : "auto";
  const KernelTable* table = FromName(requested);
  if (table == nullptr) {
    spdlog::warn("DMIA_SIMD={} unavailable; using scalar kernels", requested);
    table = &ScalarKernels();
  }
  return table;
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{InitialBackend()};
  return slot;
}

}  // namespace

const KernelTable* Avx2Kernels() {
#ifdef DMIA_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") &&
                                __builtin_cpu_supports("fma");
  return supported ? &Avx2KernelTable() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& Active() {
  return *ActiveSlot().load(std::memory_order_relaxed);
}

bool SelectBackend(absl::string_view name) {
  const KernelTable* table = FromName(name);
  if (table == nullptr) return false;
  ActiveSlot().store(table, std::memory_order_relaxed);
  return true;
}

}  // namespace dmia::kernels
