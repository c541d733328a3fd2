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

#include "enar/vocab.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "enar/errors.h"
#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"

namespace enar::vocab {
namespace {

std::vector<std::string> Regular(const SubwordVocab& v) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.IsRegular(static_cast<int>(i))) out.push_back(v.Piece(static_cast<int>(i)));
  }
  return out;
}

std::string StripMarkers(const std::vector<std::string>& pieces) {
  std::string out;
  for (const auto& p : pieces) {
    out += p.starts_with(kContinuation) ? p.substr(2) : p;
  }
  return out;
}

TEST(SubwordVocabTest, SpecialsAndPlaceholders) {
  SubwordVocab v(Scheme::kWordPiece, false);
  EXPECT_EQ(v.size(), 5u);
  EXPECT_EQ(v.Piece(kMaskId), "[MASK]");
  v.Add("a");
  v.PadWithPlaceholders(9);
  EXPECT_EQ(v.size(), 9u);
  EXPECT_EQ(v.PlaceholderCount(), 3u);
  EXPECT_EQ(v.Piece(6), "unused-1");
  EXPECT_TRUE(v.IsPlaceholder(8));
  EXPECT_FALSE(v.FindRegular("unused-1").has_value());
  EXPECT_THROW(v.Add("a"), ConfigError);
  EXPECT_TRUE(IsPlaceholderPiece("unused-12"));
  EXPECT_FALSE(IsPlaceholderPiece("unused-0"));
  EXPECT_FALSE(IsPlaceholderPiece("unused-"));
}

TEST(SubwordVocabTest, SaveLoadRoundTrip) {
  testing::TempDir dir;
  SubwordVocab v(Scheme::kUnigram, true);
  v.Add("ab", -1.5);
  v.Add("كتاب", -2.25);
  v.PadWithPlaceholders(10);
  v.Save(dir / "v.txt");
  const SubwordVocab w = SubwordVocab::Load(dir / "v.txt");
  ASSERT_EQ(w.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int id = static_cast<int>(i);
    EXPECT_EQ(w.Piece(id), v.Piece(id));
    EXPECT_EQ(w.IsPlaceholder(id), v.IsPlaceholder(id));
    if (v.IsRegular(id)) EXPECT_EQ(w.LogProb(id), v.LogProb(id));
  }
  EXPECT_EQ(w.scheme(), Scheme::kUnigram);
  EXPECT_TRUE(w.cased());
  const std::string text = testing::ReadFile(dir / "v.txt");
  EXPECT_TRUE(text.starts_with("[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\nab\n"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
}

TEST(SegmentTest, GreedyUnhappiness) {
  SubwordVocab v(Scheme::kWordPiece, true);
  for (const char* p : {"un", "##happiness", "##happy", "##ness", "u", "n"}) {
    v.Add(p);
  }
  const Segmentation s = Segment("unhappiness", v);
  EXPECT_FALSE(s.is_unk);
  const std::vector<std::string> want = {"un", "##happiness"};
  EXPECT_EQ(s.pieces, want);
  EXPECT_EQ(oracle::GreedyWordPiece("unhappiness", v), want);
}

TEST(SegmentTest, SingleCharAndUnk) {
  SubwordVocab v(Scheme::kWordPiece, true);
  v.Add("a");
  v.Add("##a");
  const Segmentation one = Segment("a", v);
  EXPECT_EQ(one.pieces, std::vector<std::string>{"a"});
  const Segmentation unk = Segment("ab", v);
  EXPECT_TRUE(unk.is_unk);
  EXPECT_EQ(unk.ids, std::vector<int>{kUnkId});
  EXPECT_TRUE(Segment(std::string(101, 'a'), v).is_unk);
  EXPECT_FALSE(Segment(std::string(100, 'a'), v).is_unk);
}

TEST(SegmentTest, UncasedNormalizes) {
  SubwordVocab v(Scheme::kWordPiece, false);
  v.Add("cafe");
  const Segmentation s = Segment("CAFÉ", v);
  EXPECT_FALSE(s.is_unk);
  EXPECT_EQ(s.word, "cafe");
}

SubwordVocab RandomWordPieceVocab(std::mt19937_64& rng) {
  const std::string alphabet = "abcd";
  std::set<std::string> pieces;
  for (char c : alphabet) {
    if (rng() % 8 != 0) pieces.insert(std::string(1, c));
    if (rng() % 8 != 0) pieces.insert("##" + std::string(1, c));
  }
  for (int k = 0; k < 25; ++k) {
    std::string p;
    const int len = 2 + static_cast<int>(rng() % 4);
    for (int i = 0; i < len; ++i) p += alphabet[rng() % alphabet.size()];
    pieces.insert(rng() % 2 ? p : "##" + p);
  }
  SubwordVocab v(Scheme::kWordPiece, true);
  for (const auto& p : pieces) v.Add(p);
  return v;
}

TEST(SegmentTest, GreedyMatchesOracleOnRandomWords) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const SubwordVocab v = RandomWordPieceVocab(rng);
    for (int k = 0; k < 100; ++k) {
      std::string w;
      const int len = 1 + static_cast<int>(rng() % 8);
      for (int i = 0; i < len; ++i) w += "abcd"[rng() % 4];
      const Segmentation s = Segment(w, v);
      const auto want = oracle::GreedyWordPiece(w, v);
      ASSERT_EQ(s.is_unk, !want.has_value()) << w;
      if (!want) continue;
      EXPECT_EQ(s.pieces, *want) << w;
      EXPECT_EQ(StripMarkers(s.pieces), w);
      for (std::size_t i = 0; i < s.ids.size(); ++i) {
        EXPECT_EQ(v.Piece(s.ids[i]), s.pieces[i]);
      }
    }
  }
}

TEST(SegmentTest, ViterbiMatchesExhaustiveOracle) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lp(-12.0, -0.5);
  for (int trial = 0; trial < 20; ++trial) {
    std::set<std::string> pieces = {"a", "b", "c", "d"};
    for (int k = 0; k < 40; ++k) {
      std::string p;
      const int len = 2 + static_cast<int>(rng() % 4);
      for (int i = 0; i < len; ++i) p += "abcd"[rng() % 4];
      pieces.insert(p);
    }
    SubwordVocab v(Scheme::kUnigram, true);
    for (const auto& p : pieces) v.Add(p, lp(rng));
    for (int k = 0; k < 100; ++k) {
      std::string w;
      const int len = 1 + static_cast<int>(rng() % 8);
      for (int i = 0; i < len; ++i) w += "abcd"[rng() % 4];
      const Segmentation s = Segment(w, v);
      const oracle::ViterbiResult want = oracle::ExhaustiveViterbi(w, v);
      ASSERT_FALSE(s.is_unk);
      ASSERT_FALSE(want.best.empty());
      EXPECT_NE(std::find(want.best.begin(), want.best.end(), s.pieces),
                want.best.end())
          << w;
      EXPECT_EQ(StripMarkers(s.pieces), w);
    }
  }
}

TEST(TrainWordPieceTest, ToyCorpusFollowsReferenceMerges) {
  const WordCounts counts = {{"ab", 1}, {"abab", 2}};
  WordPieceOptions opt;
  opt.size = 10;
  opt.cased = true;
  opt.min_pair_frequency = 1;
  const SubwordVocab v = TrainWordPiece(counts, opt);
  ASSERT_EQ(v.size(), 10u);
  const auto merges = oracle::ReferenceWordPieceMerges(counts, 2, 1);
  const std::vector<std::string> want = {"##ab", "##bab"};
  EXPECT_EQ(merges, want);
  EXPECT_EQ(v.Piece(8), "##ab");
  EXPECT_EQ(v.Piece(9), "##bab");
  EXPECT_EQ(v.Piece(5), "##a");
  EXPECT_EQ(v.Piece(6), "##b");
  EXPECT_EQ(v.Piece(7), "a");
}

TEST(TrainWordPieceTest, ZeroMergeBudgetIsAlphabet) {
  const WordCounts counts = {{"ab", 1}, {"abab", 2}};
  WordPieceOptions opt;
  opt.size = 8;
  opt.cased = true;
  const SubwordVocab v = TrainWordPiece(counts, opt);
  const std::vector<std::string> want = {"##a", "##b", "a"};
  EXPECT_EQ(Regular(v), want);
  opt.size = 7;
  EXPECT_THROW(TrainWordPiece(counts, opt), ConfigError);
}

TEST(TrainWordPieceTest, MatchesReferenceOnRandomCounts) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    std::map<std::string, std::uint64_t> m;
    for (int k = 0; k < 30; ++k) {
      std::string w;
      const int len = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < len; ++i) w += "abcde"[rng() % 5];
      m[w] += 1 + rng() % 5;
    }
    const WordCounts counts(m.begin(), m.end());
    WordPieceOptions opt;
    opt.cased = true;
    opt.min_pair_frequency = 2;
    const SubwordVocab alphabet_only = [&] {
      WordPieceOptions o = opt;
      o.size = 1000;
      return TrainWordPiece(counts, o);
    }();
    std::set<std::string> alphabet;
    for (const auto& [w, c] : counts) {
      const auto chars = unicode::SplitChars(w);
      for (std::size_t i = 0; i < chars.size(); ++i) {
        alphabet.insert(i == 0 ? chars[i] : "##" + chars[i]);
      }
    }
    std::vector<std::string> expected(alphabet.begin(), alphabet.end());
    std::set<std::string> seen(alphabet.begin(), alphabet.end());
    for (const auto& m2 : oracle::ReferenceWordPieceMerges(counts, 10000, 2)) {
      if (seen.insert(m2).second) expected.push_back(m2);
    }
    const auto got = Regular(alphabet_only);
    ASSERT_EQ(got, expected);
    EXPECT_EQ(alphabet_only.size(), 1000u);
    opt.size = kNumSpecials + alphabet.size() + 3;
    if (expected.size() >= alphabet.size() + 3) {
      const auto small = Regular(TrainWordPiece(counts, opt));
      EXPECT_EQ(small, std::vector<std::string>(expected.begin(),
                                                expected.begin() + small.size()));
      EXPECT_EQ(small.size(), alphabet.size() + 3);
    }
  }
}

TEST(TrainWordPieceTest, DeterministicAndThreadIndependent) {
  std::vector<Sentence> corpus;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    Sentence s;
    for (int k = 0; k < 6; ++k) {
      std::string w;
      const int len = 1 + static_cast<int>(rng() % 7);
      for (int j = 0; j < len; ++j) w += "abcdefgh"[rng() % 8];
      s.tokens.push_back(w);
    }
    corpus.push_back(s);
  }
  testing::TempDir dir;
  WordPieceOptions opt;
  opt.size = 200;
  opt.threads = 1;
  TrainWordPiece(corpus, opt).Save(dir / "a.txt");
  opt.threads = 4;
  TrainWordPiece(corpus, opt).Save(dir / "b.txt");
  EXPECT_EQ(testing::ReadFile(dir / "a.txt"), testing::ReadFile(dir / "b.txt"));
  EXPECT_EQ(CountWords(corpus, false, 4), CountWordsSerial(corpus, false));
}

TEST(TrainUnigramTest, RepeatedWordBecomesBestMultiCharPiece) {
  const WordCounts counts = {{"banana", 50}};
  UnigramOptions opt;
  opt.size = 40;
  const SubwordVocab v = TrainUnigram(counts, opt);
  ASSERT_EQ(v.size(), 40u);
  const auto id = v.FindRegular("banana");
  ASSERT_TRUE(id.has_value());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int k = static_cast<int>(i);
    if (!v.IsRegular(k) || k == *id) continue;
    if (unicode::CountChars(v.Piece(k)) > 1) {
      EXPECT_GT(v.LogProb(*id), v.LogProb(k)) << v.Piece(k);
    }
  }
  EXPECT_EQ(Segment("banana", v).pieces, std::vector<std::string>{"banana"});
}

TEST(TrainUnigramTest, MinimumSizeIsCharacters) {
  const WordCounts counts = {{"abc", 3}, {"cab", 2}};
  UnigramOptions opt;
  opt.size = 8;
  const SubwordVocab v = TrainUnigram(counts, opt);
  auto got = Regular(v);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<std::string>{"a", "b", "c"}));
  opt.size = 7;
  EXPECT_THROW(TrainUnigram(counts, opt), ConfigError);
}

TEST(TrainUnigramTest, ExactSizeAndViterbiOptimal) {
  std::mt19937_64 rng(4);
  std::map<std::string, std::uint64_t> m;
  for (int k = 0; k < 400; ++k) {
    std::string w;
    const int len = 2 + static_cast<int>(rng() % 7);
    for (int i = 0; i < len; ++i) w += "abcdef"[rng() % 6];
    m[w] += 1 + rng() % 4;
  }
  const WordCounts counts(m.begin(), m.end());
  UnigramOptions opt;
  opt.size = 120;
  const SubwordVocab v = TrainUnigram(counts, opt);
  ASSERT_EQ(v.size(), 120u);
  EXPECT_EQ(v.PlaceholderCount(), 0u);
  for (const auto& [w, c] : counts) {
    const Segmentation s = Segment(w, v);
    const auto want = oracle::ExhaustiveViterbi(w, v);
    EXPECT_NE(std::find(want.best.begin(), want.best.end(), s.pieces),
              want.best.end())
        << w;
  }
}

SubwordVocab Plain(std::vector<std::string> pieces) {
  SubwordVocab v(Scheme::kWordPiece, true);
  for (auto& p : pieces) v.Add(std::move(p));
  return v;
}

TEST(MergeVocabsTest, DisjointNeedsNoPlaceholders) {
  const auto a = Plain({"a1", "a2", "a3", "a4", "a5"});
  const auto b = Plain({"b1", "b2", "b3", "b4", "b5"});
  const SubwordVocab m = MergeVocabs(a, b, kNumSpecials + 10);
  EXPECT_EQ(m.size(), 15u);
  EXPECT_EQ(m.PlaceholderCount(), 0u);
  EXPECT_EQ(m.Piece(5), "a1");
  EXPECT_EQ(m.Piece(10), "b1");
}

TEST(MergeVocabsTest, IdenticalPadsHalf) {
  const auto a = Plain({"p1", "p2", "p3", "p4", "p5"});
  const SubwordVocab m = MergeVocabs(a, a, kNumSpecials + 10);
  EXPECT_EQ(m.size(), 15u);
  EXPECT_EQ(m.PlaceholderCount(), 5u);
  EXPECT_EQ(m.Piece(14), "unused-5");
}

TEST(MergeVocabsTest, ErrorsOnSmallTargetOrSchemeMismatch) {
  const auto a = Plain({"x", "y"});
  const auto b = Plain({"z"});
  EXPECT_THROW(MergeVocabs(a, b, 7), ConfigError);
  SubwordVocab u(Scheme::kUnigram, true);
  EXPECT_THROW(MergeVocabs(a, u, 100), ConfigError);
}

TEST(MergeVocabsTest, PlaceholdersNeverSegmented) {
  const auto a = Plain({"u", "##n"});
  SubwordVocab m = MergeVocabs(a, a, 20);
  const Segmentation s = Segment("unused-1", m);
  EXPECT_TRUE(s.is_unk);
}

TEST(CompositionTest, CountsScripts) {
  const auto v = Plain({"hello", "كتاب", "123"});
  const Composition c = VocabComposition(v);
  EXPECT_EQ(c.en, 1u);
  EXPECT_EQ(c.ar, 1u);
  EXPECT_EQ(c.other, 1u);
  SubwordVocab pad(Scheme::kWordPiece, true);
  pad.PadWithPlaceholders(30);
  const Composition z = VocabComposition(pad);
  EXPECT_EQ(z.en + z.ar + z.other, 0u);
}

}  // namespace
}  // namespace enar::vocab
