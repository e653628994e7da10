//
// Copyright 2026 The Cleanmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef CLEANMARK_BLOB_IO_H_
#define CLEANMARK_BLOB_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cleanmark {

// Tensor blob layout: magic "CMT1", u8 dtype (0 = f32, 1 = u32), u8 rank,
// rank x u64 dims, then the row-major payload. Everything little-endian.
enum class DType : uint8_t { kF32 = 0, kU32 = 1 };

struct TensorBlob {
  DType dtype = DType::kF32;
  std::vector<uint64_t> dims;
  std::vector<float> f32;
  std::vector<uint32_t> u32;

  uint64_t element_count() const;
};

std::vector<uint8_t> EncodeTensorF32(std::span<const uint64_t> dims,
                                     std::span<const float> data);
std::vector<uint8_t> EncodeTensorU32(std::span<const uint64_t> dims,
                                     std::span<const uint32_t> data);
// Throws FormatError on bad magic, unknown dtype or truncated payload.
TensorBlob DecodeTensor(std::span<const uint8_t> bytes);

// Text blob layout: u32 sample count, then per sample u32 length followed by
// that many u32 token ids.
std::vector<uint8_t> EncodeTextBlob(
    std::span<const std::vector<uint32_t>> sequences);
std::vector<std::vector<uint32_t>> DecodeTextBlob(std::span<const uint8_t> bytes);

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes);
std::string ReadFileText(const std::filesystem::path& path);
void WriteFileText(const std::filesystem::path& path, const std::string& text);

// Little-endian primitives shared by the binary formats.
void AppendU32(std::vector<uint8_t>& out, uint32_t v);
void AppendU64(std::vector<uint8_t>& out, uint64_t v);
void AppendF32(std::vector<uint8_t>& out, float v);

// Bounds-checked little-endian reader.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}
  uint8_t U8();
  uint32_t U32();
  uint64_t U64();
  float F32();
  std::span<const uint8_t> Take(size_t n);
  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

}  // namespace cleanmark

#endif  // CLEANMARK_BLOB_IO_H_
