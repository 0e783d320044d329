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

#include "binary_io.h"

#include <zlib.h>

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace dmia::internal {

std::uint32_t Crc32(absl::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()),
              static_cast<uInt>(data.size()));
  return static_cast<std::uint32_t>(crc);
}

void ByteWriter::Crc32Trailer() { U32(Crc32(buf_)); }

std::optional<absl::string_view> ByteReader::Bytes(std::size_t n) {
  if (remaining() < n) return std::nullopt;
  absl::string_view out = data_.substr(offset_, n);
  offset_ += n;
  return out;
}

std::optional<float> ByteReader::F32() {
  auto bits = U32();
  if (!bits) return std::nullopt;
  float v;
  std::memcpy(&v, &*bits, 4);
  return v;
}

std::optional<double> ByteReader::F64() {
  auto bits = Le<std::uint64_t>(8);
  if (!bits) return std::nullopt;
  double v;
  std::memcpy(&v, &*bits, 8);
  return v;
}

absl::StatusOr<absl::string_view> StripCrc32(absl::string_view data,
                                            absl::string_view what) {
  if (data.size() < 4) {
    return absl::DataLossError(absl::StrCat(
        what, " corrupt at byte offset 0: file too short for a CRC32"));
  }
  const absl::string_view payload = data.substr(0, data.size() - 4);
  ByteReader trailer(data.substr(data.size() - 4));
  const std::uint32_t stored = *trailer.U32();
  const std::uint32_t actual = Crc32(payload);
  if (stored != actual) {
    return absl::DataLossError(absl::StrCat(
        what, " corrupt at byte offset ", payload.size(),
        ": CRC32 mismatch (stored ", stored, ", computed ", actual, ")"));
  }
  return payload;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open ", path, " for writing"));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("write failed: ", path));
  }
  return absl::OkStatus();
}

}  // namespace dmia::internal
