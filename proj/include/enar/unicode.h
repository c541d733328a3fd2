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

#ifndef ENAR_UNICODE_H_
#define ENAR_UNICODE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace enar::unicode {

// Byte offset of the first ill-formed UTF-8 sequence, or nullopt when the
// whole buffer is valid.
std::optional<std::size_t> FindInvalidUtf8(std::string_view text);

std::string Nfc(std::string_view text);

// Lowercase, then drop Latin combining accents and Arabic tashkeel
// (U+064B..U+0652, U+0670), then recompose to NFC.
std::string FoldUncased(std::string_view text);

// Splits a valid UTF-8 string into one string per code point.
std::vector<std::string> SplitChars(std::string_view text);

std::size_t CountChars(std::string_view text);

// Decodes valid UTF-8 into code points.
std::u32string Decode(std::string_view text);
std::string Encode(std::u32string_view cps);

bool IsArabicLetterRange(char32_t cp);
bool IsAlphabetic(char32_t cp);
bool IsLatinScript(char32_t cp);
bool IsWhitespace(char32_t cp);
bool IsPunctuation(char32_t cp);

// Collapses runs of Unicode whitespace to a single ASCII space and trims.
std::string CollapseWhitespace(std::string_view text);

// Splits on Unicode whitespace, dropping empty fields.
std::vector<std::string> SplitWhitespace(std::string_view text);

}  // namespace enar::unicode

#endif  // ENAR_UNICODE_H_
