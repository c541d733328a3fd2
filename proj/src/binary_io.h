// Copyright 2026 The enar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ENAR_SRC_BINARY_IO_H_
#define ENAR_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace enar::binary {

inline void PutU8(std::string& out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}

inline void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

inline void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

inline void PutF32(std::string& out, float v) {
  PutU32(out, std::bit_cast<std::uint32_t>(v));
}

// Bounds are the caller's job: check Has() before reading.
class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  bool Has(std::size_t n) const { return data_.size() - pos_ >= n; }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t pos() const { return pos_; }

  std::uint8_t U8() { return static_cast<std::uint8_t>(data_[pos_++]); }
  std::uint16_t U16() {
    const std::uint16_t lo = U8();
    return static_cast<std::uint16_t>(lo | (U8() << 8));
  }
  std::uint32_t U32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(U8()) << (8 * i);
    }
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  std::string_view Bytes(std::size_t n) {
    const std::string_view s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace enar::binary

#endif  // ENAR_SRC_BINARY_IO_H_
