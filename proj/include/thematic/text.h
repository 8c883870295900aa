// Copyright 2026 The Thematic Authors.
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

// Unicode helpers. All engine text is UTF-8; character offsets exposed by
// the engine count Unicode code points, not bytes.

#ifndef THEMATIC_TEXT_H_
#define THEMATIC_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace thematic::text {

bool is_valid_utf8(std::string_view bytes);

// Strict decode; throws InvalidEncoding on malformed input.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view codepoints);

std::string to_nfc(std::string_view utf8);

bool is_space(char32_t c);

// Collapses every whitespace run to a single space and trims both ends.
std::u32string collapse_whitespace(std::u32string_view s);

// NFC + whitespace collapse + trim. The canonical form used for matching.
std::string normalize(std::string_view utf8);

// Simple (length preserving) Unicode case folding.
std::u32string fold_case(std::u32string_view s);

std::size_t length(std::string_view utf8);

// Code point slice [start, end) of a UTF-8 string.
std::string slice(std::string_view utf8, std::size_t start, std::size_t end);

std::string sha256_hex(std::string_view bytes);

std::string trim(std::string_view s);

std::string to_lower_ascii(std::string_view s);

}  // namespace thematic::text

#endif  // THEMATIC_TEXT_H_
