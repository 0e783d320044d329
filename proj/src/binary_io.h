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

#ifndef DMIA_SRC_BINARY_IO_H_
#define DMIA_SRC_BINARY_IO_H_

#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace dmia::internal {

// Little-endian encoder for the checkpoint and dataset containers.
class ByteWriter {
 public:
  void Bytes(absl::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void U16(std::uint16_t v) { Le(v, 2); }
  void U32(std::uint32_t v) { Le(v, 4); }
  void F32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    Le(bits, 4);
  }
  void F64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    Le(bits, 8);
  }
  // Appends CRC32 of everything written so far.
  void Crc32Trailer();

  const std::string& bytes() const { return buf_; }

 private:
  void Le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
  }
  std::string buf_;
};

// Bounds-checked decoder. Every read returns nullopt past the end; offset()
// is where the failed read started.
class ByteReader {
 public:
  explicit ByteReader(absl::string_view data) : data_(data) {}

  std::optional<absl::string_view> Bytes(std::size_t n);
  std::optional<std::uint16_t> U16() { return Le<std::uint16_t>(2); }
  std::optional<std::uint32_t> U32() { return Le<std::uint32_t>(4); }
  std::optional<float> F32();
  std::optional<double> F64();

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return data_.size() - offset_; }

 private:
  template <typename T>
  std::optional<T> Le(std::size_t n) {
    if (remaining() < n) return std::nullopt;
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      v |= std::uint64_t{static_cast<unsigned char>(data_[offset_ + i])}
           << (8 * i);
    }
    offset_ += n;
    return static_cast<T>(v);
  }

  absl::string_view data_;
  std::size_t offset_ = 0;
};

std::uint32_t Crc32(absl::string_view data);

// Checks the trailing CRC32; returns the payload without it.
absl::StatusOr<absl::string_view> StripCrc32(absl::string_view data,
                                            absl::string_view what);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

}  // namespace dmia::internal

#endif  // DMIA_SRC_BINARY_IO_H_
