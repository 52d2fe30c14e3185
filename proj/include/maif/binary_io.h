// Copyright 2026 The MVAE-AIF Authors
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

#ifndef MAIF_BINARY_IO_H_
#define MAIF_BINARY_IO_H_

// Little-endian primitives shared by the checkpoint and dataset formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "maif/error.h"

namespace maif::io {

template <typename T>
T ByteSwapIfBigEndian(T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

template <typename T>
void Write(std::ostream& out, T value) {
  value = ByteSwapIfBigEndian(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
  if (!out) throw FormatError("write failed");
}

template <typename T>
T Read(std::istream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError("unexpected end of stream");
  return ByteSwapIfBigEndian(value);
}

inline void WriteMagic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!out) throw FormatError("write failed");
}

inline void ExpectMagic(std::istream& in, std::string_view magic) {
  std::string buffer(magic.size(), '\0');
  in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!in || buffer != magic) {
    throw FormatError("bad magic, expected '" + std::string(magic) + "'");
  }
}

inline void WriteString(std::ostream& out, const std::string& s) {
  Write<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!out) throw FormatError("write failed");
}

inline std::string ReadString(std::istream& in) {
  const auto size = Read<std::uint32_t>(in);
  if (size > (1u << 24)) throw FormatError("string too long");
  std::string s(size, '\0');
  in.read(s.data(), size);
  if (!in) throw FormatError("unexpected end of stream");
  return s;
}

}  // namespace maif::io

#endif  // MAIF_BINARY_IO_H_
