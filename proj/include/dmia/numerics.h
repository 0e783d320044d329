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

#ifndef DMIA_NUMERICS_H_
#define DMIA_NUMERICS_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace dmia {

// Dense real vector. Holds x0, x_t, noise draws and predicted noise.
class Vector {
 public:
  Vector() = default;
  // No validation; arithmetic helpers use this on already-finite inputs.
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}
  Vector(std::initializer_list<double> values) : data_(values) {}

  // Rejects empty input and non-finite entries.
  static absl::StatusOr<Vector> FromValues(std::vector<double> values);
  static Vector Zeros(std::size_t dim) {
    return Vector(std::vector<double>(dim, 0.0));
  }

  std::size_t dim() const { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  std::span<const double> values() const { return data_; }
  std::span<double> mutable_values() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  bool AllFinite() const;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

// a * x + b * y. Dimensions must match.
Vector LinearCombination(double a, const Vector& x, double b, const Vector& y);

enum class NormKind { kL1, kL2, kL2Squared };

double Norm(const Vector& v, NormKind kind);

// Row-major dense matrix, only as large as the metrics need.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// LU factorization with partial pivoting. Non-square or empty input is an
// invalid argument.
absl::StatusOr<double> Determinant(const Matrix& m);

// Counter-based generator (Philox4x32-10). The output is a pure function of
// (master_seed, stream_id, draw index), so streams can be split per purpose
// without perturbing each other.
class SeededRng {
 public:
  SeededRng(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream whose id is a hash of (stream_id, child). Children of
  // distinct parents or with distinct child ids do not collide in practice.
  SeededRng Substream(std::uint64_t child) const;

  std::uint64_t NextU64();
  // Uniform on the open interval (0, 1) with 53 random bits.
  double NextUniform();
  // Uniform integer in [0, bound), bound > 0. Unbiased.
  std::uint64_t NextBelow(std::uint64_t bound);
  double NextGaussian();

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::uint64_t buffered_u64_ = 0;
  bool has_buffered_u64_ = false;
  double buffered_gaussian_ = 0.0;
  bool has_buffered_gaussian_ = false;
};

// dim i.i.d. standard normals; dim == 0 is an invalid argument.
absl::StatusOr<Vector> GaussianVector(SeededRng& rng, std::size_t dim);

// Fisher-Yates shuffle of [0, n) driven by rng.
std::vector<std::size_t> Permutation(SeededRng& rng, std::size_t n);

}  // namespace dmia

#endif  // DMIA_NUMERICS_H_
