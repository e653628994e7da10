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

#include "cleanmark/blob_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "cleanmark/errors.h"

namespace cleanmark {
namespace {

constexpr char kTensorMagic[4] = {'C', 'M', 'T', '1'};

}  // namespace

uint64_t TensorBlob::element_count() const {
  uint64_t n = 1;
  for (uint64_t d : dims) n *= d;
  return n;
}

void AppendU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void AppendU64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void AppendF32(std::vector<uint8_t>& out, float v) {
  AppendU32(out, std::bit_cast<uint32_t>(v));
}

uint8_t ByteReader::U8() { return Take(1)[0]; }

uint32_t ByteReader::U32() {
  auto b = Take(4);
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<size_t>(i)];
  return v;
}

uint64_t ByteReader::U64() {
  auto b = Take(8);
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<size_t>(i)];
  return v;
}

float ByteReader::F32() { return std::bit_cast<float>(U32()); }

std::span<const uint8_t> ByteReader::Take(size_t n) {
  if (n > remaining()) {
    throw FormatError("truncated blob: need " + std::to_string(n) +
                      " bytes at offset " + std::to_string(pos_) + ", have " +
                      std::to_string(remaining()));
  }
  auto out = bytes_.subspan(pos_, n);
  pos_ += n;
  return out;
}

namespace {

std::vector<uint8_t> EncodeHeader(DType dtype, std::span<const uint64_t> dims) {
  if (dims.size() > 255) throw InvalidArgumentError("tensor rank exceeds 255");
  std::vector<uint8_t> out(kTensorMagic, kTensorMagic + 4);
  out.push_back(static_cast<uint8_t>(dtype));
  out.push_back(static_cast<uint8_t>(dims.size()));
  for (uint64_t d : dims) AppendU64(out, d);
  return out;
}

uint64_t Product(std::span<const uint64_t> dims) {
  uint64_t n = 1;
  for (uint64_t d : dims) n *= d;
  return n;
}

}  // namespace

std::vector<uint8_t> EncodeTensorF32(std::span<const uint64_t> dims,
                                     std::span<const float> data) {
  if (Product(dims) != data.size()) {
    throw InvalidArgumentError("tensor dims do not match payload size");
  }
  auto out = EncodeHeader(DType::kF32, dims);
  out.reserve(out.size() + 4 * data.size());
  for (float v : data) AppendF32(out, v);
  return out;
}

std::vector<uint8_t> EncodeTensorU32(std::span<const uint64_t> dims,
                                     std::span<const uint32_t> data) {
  if (Product(dims) != data.size()) {
    throw InvalidArgumentError("tensor dims do not match payload size");
  }
  auto out = EncodeHeader(DType::kU32, dims);
  out.reserve(out.size() + 4 * data.size());
  for (uint32_t v : data) AppendU32(out, v);
  return out;
}

TensorBlob DecodeTensor(std::span<const uint8_t> bytes) {
  ByteReader reader(bytes);
  auto magic = reader.Take(4);
  if (std::memcmp(magic.data(), kTensorMagic, 4) != 0) {
    throw FormatError("bad tensor magic (expected CMT1)");
  }
  TensorBlob blob;
  const uint8_t code = reader.U8();
  if (code > 1) throw FormatError("unknown tensor dtype code " + std::to_string(code));
  blob.dtype = static_cast<DType>(code);
  const uint8_t rank = reader.U8();
  blob.dims.resize(rank);
  for (auto& d : blob.dims) d = reader.U64();
  const uint64_t count = blob.element_count();
  if (count > reader.remaining() / 4) {
    throw FormatError("tensor payload shorter than its dims declare");
  }
  if (blob.dtype == DType::kF32) {
    blob.f32.resize(count);
    for (auto& v : blob.f32) v = reader.F32();
  } else {
    blob.u32.resize(count);
    for (auto& v : blob.u32) v = reader.U32();
  }
  if (reader.remaining() != 0) throw FormatError("trailing bytes after tensor payload");
  return blob;
}

std::vector<uint8_t> EncodeTextBlob(
    std::span<const std::vector<uint32_t>> sequences) {
  std::vector<uint8_t> out;
  AppendU32(out, static_cast<uint32_t>(sequences.size()));
  for (const auto& seq : sequences) {
    AppendU32(out, static_cast<uint32_t>(seq.size()));
    for (uint32_t id : seq) AppendU32(out, id);
  }
  return out;
}

std::vector<std::vector<uint32_t>> DecodeTextBlob(std::span<const uint8_t> bytes) {
  ByteReader reader(bytes);
  const uint32_t count = reader.U32();
  std::vector<std::vector<uint32_t>> out;
  out.reserve(std::min<size_t>(count, reader.remaining() / 4));
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t length = reader.U32();
    if (length > reader.remaining() / 4) {
      throw FormatError("text sample " + std::to_string(i) + " truncated");
    }
    std::vector<uint32_t> seq(length);
    for (auto& id : seq) id = reader.U32();
    out.push_back(std::move(seq));
  }
  if (reader.remaining() != 0) throw FormatError("trailing bytes after text blob");
  return out;
}

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string ReadFileText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void WriteFileText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace cleanmark
