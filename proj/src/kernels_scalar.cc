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

#include <cmath>

#include "dmia/kernels.h"

namespace dmia::kernels {
namespace {

double ScalarDot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void ScalarAxpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double ScalarSquaredDistance(const double* a, const double* b,
                             std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double ScalarL1Distance(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::fabs(a[i] - b[i]);
  return sum;
}

void ScalarGemv(const double* w, std::size_t rows, std::size_t cols,
                const double* x, const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + ScalarDot(w + r * cols, x, cols);
  }
}

void ScalarGemvTransposeAccumulate(const double* w, std::size_t rows,
                                   std::size_t cols, const double* d,
                                   double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    ScalarAxpy(d[r], w + r * cols, out, cols);
  }
}

void ScalarRank1Accumulate(double* g, std::size_t rows, std::size_t cols,
                           const double* d, const double* a) {
  for (std::size_t r = 0; r < rows; ++r) {
    ScalarAxpy(d[r], a, g + r * cols, cols);
  }
}

}  // namespace

const KernelTable& ScalarKernels() {
  static const KernelTable table{
      .name = "scalar",
      .dot = ScalarDot,
      .axpy = ScalarAxpy,
      .squared_distance = ScalarSquaredDistance,
      .l1_distance = ScalarL1Distance,
      .gemv = ScalarGemv,
      .gemv_transpose_accumulate = ScalarGemvTransposeAccumulate,
      .rank1_accumulate = ScalarRank1Accumulate,
  };
  return table;
}

}  // namespace dmia::kernels
