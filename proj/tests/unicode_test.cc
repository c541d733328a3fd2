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

#include "enar/unicode.h"

#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace enar::unicode {
namespace {

TEST(UnicodeTest, FindsInvalidUtf8) {
  EXPECT_FALSE(FindInvalidUtf8("hello كتاب").has_value());
  EXPECT_EQ(FindInvalidUtf8("ab\xff" "cd"), 2u);
  EXPECT_EQ(FindInvalidUtf8("a\xc3"), 1u);
}

TEST(UnicodeTest, NfcComposes) {
  EXPECT_EQ(Nfc("e\xcc\x81"), "\xc3\xa9");
}

TEST(UnicodeTest, FoldUncasedStripsAccentsAndTashkeel) {
  EXPECT_EQ(FoldUncased("Café"), "cafe");
  EXPECT_EQ(FoldUncased("HELLO"), "hello");
  // kitaab with fatha and alif.
  EXPECT_EQ(FoldUncased("كِتَاب"), "كتاب");
}

TEST(UnicodeTest, SplitCharsByCodePoint) {
  const std::vector<std::string> want = {"a", "ك", "é"};
  EXPECT_EQ(SplitChars("aكé"), want);
  EXPECT_EQ(CountChars("aكé"), 3u);
}

TEST(UnicodeTest, DecodeEncodeRoundTrip) {
  const std::string s = "Paris باريس 123";
  EXPECT_EQ(Encode(Decode(s)), s);
}

TEST(UnicodeTest, CollapseWhitespace) {
  EXPECT_EQ(CollapseWhitespace("  a \t b\n c  "), "a b c");
  const std::vector<std::string> want = {"a", "b", "c"};
  EXPECT_EQ(SplitWhitespace(" a  b\tc\n"), want);
}

TEST(UnicodeTest, ScriptPredicates) {
  EXPECT_TRUE(IsArabicLetterRange(U'ك'));
  EXPECT_FALSE(IsArabicLetterRange(U'a'));
  EXPECT_TRUE(IsLatinScript(U'a'));
  EXPECT_FALSE(IsLatinScript(U'1'));
  EXPECT_TRUE(IsPunctuation(U'.'));
  EXPECT_TRUE(IsPunctuation(U'؟'));
  EXPECT_TRUE(IsWhitespace(U' '));
}

}  // namespace
}  // namespace enar::unicode
