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

#ifndef DMIA_KERNELS_H_
#define DMIA_KERNELS_H_

#include <cstddef>
#include <span>

#include "absl/strings/string_view.h"

namespace dmia::kernels {

// Flat table of the arithmetic inner loops. Every backend computes the same
// quantities; only the summation order (and FMA contraction) differs, so
// results agree to rounding, not bit-for-bit. Matrices are row-major.
struct KernelTable {
  absl::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  double (*l1_distance)(const double* a, const double* b, std::size_t n);
  // y = W x + bias, W is rows x cols.
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols,
               const double* x, const double* bias, double* y);
  // out += W^T d, W is rows x cols, d has rows entries, out has cols.
  void (*gemv_transpose_accumulate)(const double* w, std::size_t rows,
                                    std::size_t cols, const double* d,
                                    double* out);
  // g += d a^T, g is rows x cols.
  void (*rank1_accumulate)(double* g, std::size_t rows, std::size_t cols,
                           const double* d, const double* a);
};

const KernelTable& ScalarKernels();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks
// AVX2+FMA.
const KernelTable* Avx2Kernels();

// Backend picked once per process: DMIA_SIMD={auto,scalar,avx2} overrides
// the CPU probe. An unavailable request falls back to scalar.
const KernelTable& Active();

// Test hook: force a backend for the rest of the process. Returns false if
// `name` is unknown or unavailable.
bool SelectBackend(absl::string_view name);

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Active().dot(a.data(), b.data(), a.size());
}

inline void Axpy(double alpha, std::span<const double> x,
                 std::span<double> y) {
  Active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double SquaredDistance(std::span<const double> a,
                              std::span<const double> b) {
  return Active().squared_distance(a.data(), b.data(), a.size());
}

inline double L1Distance(std::span<const double> a,
                         std::span<const double> b) {
  return Active().l1_distance(a.data(), b.data(), a.size());
}

}  // namespace dmia::kernels

#endif  // DMIA_KERNELS_H_
