// Copyright 2026 The conlid Authors.
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

#ifndef CONLID_SRC_UTF8_H_
#define CONLID_SRC_UTF8_H_

#include <cstddef>
#include <string_view>
#include <vector>

namespace conlid::internal {

// Byte offsets of every code point start in `s`, plus s.size() as a sentinel.
// Malformed sequences count one code point per offending byte.
inline std::vector<size_t> CodePointOffsets(std::string_view s) {
  std::vector<size_t> offsets;
  offsets.reserve(s.size() + 1);
  size_t i = 0;
  while (i < s.size()) {
    offsets.push_back(i);
    const auto lead = static_cast<unsigned char>(s[i]);
    size_t len = 1;
    if (lead >= 0xF0 && lead <= 0xF4) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = lead <= 0xEF ? 3 : 1;
    } else if (lead >= 0xC2) {
      len = 2;
    }
    if (i + len > s.size()) len = 1;
    for (size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    i += len;
  }
  offsets.push_back(s.size());
  return offsets;
}

inline size_t CodePointCount(std::string_view s) {
  return CodePointOffsets(s).size() - 1;
}

}  // namespace conlid::internal

#endif  // CONLID_SRC_UTF8_H_
