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

#include "dmia/numerics.h"

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dmia/kernels.h"

namespace dmia {

absl::StatusOr<Vector> Vector::FromValues(std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("vector dimension must be positive");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite vector entry at index ", i));
    }
  }
  return Vector(std::move(values));
}

bool Vector::AllFinite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Vector LinearCombination(double a, const Vector& x, double b,
                         const Vector& y) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
  return Vector(std::move(out));
}

double Norm(const Vector& v, NormKind kind) {
  switch (kind) {
    case NormKind::kL1: {
      double sum = 0.0;
      for (double x : v.values()) sum += std::fabs(x);
      return sum;
    }
    case NormKind::kL2:
      return std::sqrt(Norm(v, NormKind::kL2Squared));
    case NormKind::kL2Squared:
      return kernels::Dot(v.values(), v.values());
  }
  return 0.0;
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    for (double x : row) data_.push_back(x);
  }
  // Ragged initializers leave a short buffer; mark the matrix non-square.
  if (data_.size() != rows_ * cols_) {
    cols_ = 0;
    data_.clear();
  }
}

absl::StatusOr<double> Determinant(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("determinant needs a non-empty square matrix, got ",
                     m.rows(), "x", m.cols()));
  }
  const std::size_t n = m.rows();
  Matrix lu = m;
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::fabs(lu(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(lu(r, col)) > best) {
        best = std::fabs(lu(r, col));
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(col, c), lu(pivot, c));
      det = -det;
    }
    const double diag = lu(col, col);
    det *= diag;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = lu(r, col) / diag;
      if (factor == 0.0) continue;
      for (std::size_t c = col + 1; c < n; ++c) lu(r, c) -= factor * lu(col, c);
    }
  }
  return det;
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

SeededRng SeededRng::Substream(std::uint64_t child) const {
  return SeededRng(master_seed_,
                   SplitMix64(SplitMix64(stream_id_) ^ (child + 0x5851F42D4C957F2Dull)));
}

std::uint64_t SeededRng::NextU64() {
  if (has_buffered_u64_) {
    has_buffered_u64_ = false;
    return buffered_u64_;
  }
  const std::array<std::uint32_t, 4> out = Philox4x32(
      {static_cast<std::uint32_t>(block_),
       static_cast<std::uint32_t>(block_ >> 32),
       static_cast<std::uint32_t>(stream_id_),
       static_cast<std::uint32_t>(stream_id_ >> 32)},
      {static_cast<std::uint32_t>(master_seed_),
       static_cast<std::uint32_t>(master_seed_ >> 32)});
  ++block_;
  buffered_u64_ = (std::uint64_t{out[3]} << 32) | out[2];
  has_buffered_u64_ = true;
  return (std::uint64_t{out[1]} << 32) | out[0];
}

double SeededRng::NextUniform() {
  // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t SeededRng::NextBelow(std::uint64_t bound) {
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  while (true) {
    const std::uint64_t x = NextU64();
    if (x >= limit) return x % bound;
  }
}

double SeededRng::NextGaussian() {
  if (has_buffered_gaussian_) {
    has_buffered_gaussian_ = false;
    return buffered_gaussian_;
  }
  const double u1 = NextUniform();
  const double u2 = NextUniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  buffered_gaussian_ = radius * std::sin(angle);
  has_buffered_gaussian_ = true;
  return radius * std::cos(angle);
}

absl::StatusOr<Vector> GaussianVector(SeededRng& rng, std::size_t dim) {
  if (dim == 0) {
    return absl::InvalidArgumentError("gaussian vector dimension must be >= 1");
  }
  std::vector<double> out(dim);
  for (double& x : out) x = rng.NextGaussian();
  return Vector(std::move(out));
}

std::vector<std::size_t> Permutation(SeededRng& rng, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.NextBelow(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace dmia
