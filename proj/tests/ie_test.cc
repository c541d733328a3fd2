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

#include "enar/ie.h"

#include <algorithm>
#include <random>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "enar/errors.h"
#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"

namespace enar::ie {
namespace {

// "Rebels attacked the town" with a second sentence.
AnnotatedDoc AttackDoc() {
  AnnotatedDoc d;
  d.doc_id = "doc1";
  d.text = "Rebels attacked the town yesterday. Police came.";
  d.sentences = {{0, 35}, {36, 48}};
  d.entities = {{"A1", {0, 6}, "ORG"},
                {"A2", {20, 24}, "GPE"},
                {"E3", {25, 34}, "TIME"},
                {"E4", {36, 42}, "ORG"}};
  d.triggers = {{"T1", {7, 15}, "Attack"}, {"T2", {43, 47}, "Transport"}};
  d.arguments = {{"T1", "A1", "Attacker"}, {"T1", "A2", "Place"}};
  d.relations = {{"R1", "A1", "A2", "PHYS"}};
  return d;
}

std::multiset<oracle::InstanceKey> Keys(const std::vector<Instance>& v) {
  std::multiset<oracle::InstanceKey> out;
  for (const auto& i : v) out.insert(oracle::Key(i));
  return out;
}

TEST(ValidateTest, AcceptsFixtureAndRejectsBrokenDocs) {
  const AnnotatedDoc d = AttackDoc();
  EXPECT_NO_THROW(Validate(d));
  AnnotatedDoc dup = d;
  dup.entities.push_back(dup.entities[0]);
  EXPECT_THROW(Validate(dup), InputError);
  AnnotatedDoc dangling = d;
  dangling.arguments.push_back({"T1", "ZZ", "Place"});
  EXPECT_THROW(Validate(dangling), InputError);
  AnnotatedDoc cross = d;
  cross.relations.push_back({"R2", "A1", "E4", "ORG-AFF"});
  EXPECT_THROW(Validate(cross), InputError);
  AnnotatedDoc outside = d;
  outside.entities[0].span = {30, 40};
  EXPECT_THROW(Validate(outside), InputError);
}

TEST(ArlTest, PositivesAndNegatives) {
  const auto got = BuildArl(AttackDoc());
  std::set<std::tuple<std::string, std::string, std::string>> labels;
  for (const auto& i : got) labels.insert({i.id_a, i.id_b, i.label});
  const std::set<std::tuple<std::string, std::string, std::string>> want = {
      {"T1", "A1", "Attacker"},
      {"T1", "A2", "Place"},
      {"T1", "E3", std::string(kNegative)},
      {"T2", "E4", std::string(kNegative)}};
  EXPECT_EQ(labels, want);
  for (const auto& i : got) {
    if (i.id_b == "E4") {
      EXPECT_EQ(i.sentence, 1u);
      EXPECT_EQ(i.text, "Police came.");
      EXPECT_EQ(i.span_b.start, 0u);
      EXPECT_EQ(i.span_a.start, 7u);
    }
  }
}

TEST(ArlTest, TriggerWithoutEntitiesGivesNothing) {
  AnnotatedDoc d;
  d.doc_id = "x";
  d.text = "It exploded.";
  d.sentences = {{0, 12}};
  d.triggers = {{"T1", {3, 11}, "Attack"}};
  EXPECT_TRUE(BuildArl(d).empty());
}

TEST(ArlTest, ArgumentOfOneTriggerIsNegativeForAnother) {
  AnnotatedDoc d = AttackDoc();
  d.triggers.push_back({"T3", {16, 19}, "Die"});
  for (const auto& i : BuildArl(d)) {
    if (i.id_a == "T3") EXPECT_EQ(i.label, kNegative);
  }
}

TEST(ArlTest, MatchesEnumeratorOnRandomDocs) {
  std::mt19937_64 rng(31);
  std::vector<AnnotatedDoc> docs;
  for (int i = 0; i < 40; ++i) docs.push_back(oracle::RandomDoc(rng, "d" + std::to_string(i)));
  std::multiset<oracle::InstanceKey> want;
  for (const auto& d : docs) {
    ASSERT_NO_THROW(Validate(d));
    const auto e = oracle::EnumerateArl(d);
    want.insert(e.begin(), e.end());
  }
  EXPECT_EQ(Keys(BuildArlAll(docs, 1)), want);
  EXPECT_EQ(BuildArlAll(docs, 4), BuildArlAll(docs, 1));
}

TEST(ReTest, CandidateNegatives) {
  AnnotatedDoc d;
  d.doc_id = "x";
  d.text = "A met B and C.";
  d.sentences = {{0, 14}};
  d.entities = {{"A", {0, 1}, "PER"}, {"B", {6, 7}, "PER"}, {"C", {12, 13}, "PER"}};
  d.relations = {{"R1", "A", "B", "PER-SOC"}};
  ReOptions opt;
  opt.negative_ratio = 100.0;
  const auto got = BuildRe(d, opt, 0.0);
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  for (const auto& i : got) keys.insert({i.id_a, i.id_b, i.label});
  const std::set<std::tuple<std::string, std::string, std::string>> want = {
      {"A", "B", "PER-SOC"},
      {"A", "C", std::string(kNegative)},
      {"B", "C", std::string(kNegative)}};
  EXPECT_EQ(keys, want);
  opt.negative_ratio = 0.0;
  ASSERT_EQ(BuildRe(d, opt, 0.0).size(), 1u);
  opt.negative_ratio = 1.0;
  EXPECT_EQ(BuildRe(d, opt, 0.0).size(), 2u);
}

TEST(ReTest, SingleEntityNoPairs) {
  AnnotatedDoc d;
  d.doc_id = "x";
  d.text = "Alone.";
  d.sentences = {{0, 6}};
  d.entities = {{"A", {0, 5}, "PER"}};
  EXPECT_TRUE(BuildRe(d, ReOptions{}, 3.0).empty());
}

TEST(ReTest, MatchesEnumeratorOnRandomDocs) {
  std::mt19937_64 rng(47);
  std::vector<AnnotatedDoc> docs;
  for (int i = 0; i < 40; ++i) docs.push_back(oracle::RandomDoc(rng, "d" + std::to_string(i)));
  const double fallback = MeanRelationsPerSentence(docs);
  for (const double ratio : {0.0, 1.0, 2.5, 1e9}) {
    ReOptions opt;
    opt.negative_ratio = ratio;
    opt.seed = 5;
    for (const auto& d : docs) {
      const auto e = oracle::EnumerateRe(d);
      const auto got = BuildRe(d, opt, fallback);
      std::multiset<oracle::InstanceKey> pos;
      std::map<std::size_t, std::set<oracle::InstanceKey>> neg;
      for (const auto& i : got) {
        if (i.label == kNegative) {
          EXPECT_TRUE(neg[i.sentence].insert(oracle::Key(i)).second);
        } else {
          pos.insert(oracle::Key(i));
        }
      }
      EXPECT_EQ(pos, e.positives);
      for (const auto& [s, cands] : e.negatives) {
        std::size_t gold = 0;
        for (const auto& k : e.positives) gold += std::get<1>(k) == s;
        const double base = gold ? static_cast<double>(gold) : fallback;
        const std::size_t quota = std::min<std::size_t>(
            cands.size(), static_cast<std::size_t>(std::llround(ratio * base)));
        EXPECT_EQ(neg[s].size(), quota);
        EXPECT_TRUE(std::includes(cands.begin(), cands.end(), neg[s].begin(),
                                  neg[s].end()));
      }
      for (const auto& [s, picked] : neg) {
        if (!picked.empty()) EXPECT_TRUE(e.negatives.count(s));
      }
    }
    EXPECT_EQ(BuildReAll(docs, opt, 3), BuildReAll(docs, opt, 1));
  }
}

TEST(ReTest, MeanRelationsPerSentence) {
  const AnnotatedDoc d = AttackDoc();
  const std::vector<AnnotatedDoc> docs = {d};
  // Only the first sentence holds two or more entities.
  EXPECT_DOUBLE_EQ(MeanRelationsPerSentence(docs), 1.0);
}

TEST(SplitTest, TenDocs) {
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back("doc" + std::to_string(i));
  const DocSplit s = SplitDocs(ids, {0.8, 0.1, 0.1}, 1);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.dev.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
  const DocSplit again = SplitDocs(ids, {0.8, 0.1, 0.1}, 1);
  EXPECT_EQ(s.train, again.train);
  EXPECT_EQ(s.test, again.test);
  std::vector<std::string> all = s.train;
  all.insert(all.end(), s.dev.begin(), s.dev.end());
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(all, ids);
}

TEST(SplitTest, FloorCutsForManySizes) {
  for (std::size_t n = 3; n < 200; n += 7) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    const DocSplit s = SplitDocs(ids, {0.8, 0.1, 0.1}, n);
    EXPECT_EQ(s.train.size(), n * 8 / 10);
    EXPECT_EQ(s.train.size() + s.dev.size(), n * 9 / 10);
    EXPECT_EQ(s.train.size() + s.dev.size() + s.test.size(), n);
  }
}

TEST(SplitTest, Errors) {
  EXPECT_THROW(SplitDocs({"a", "b"}, {0.8, 0.1, 0.1}, 1), ConfigError);
  EXPECT_THROW(SplitDocs({"a", "b", "c"}, {0.8, 0.1, 0.2}, 1), ConfigError);
  EXPECT_THROW(SplitDocs({"a", "a", "c"}, {0.8, 0.1, 0.1}, 1), InputError);
}

TEST(JsonTest, DocRoundTripAndFileErrors) {
  testing::TempDir dir;
  const AnnotatedDoc d = AttackDoc();
  EXPECT_EQ(DocFromJson(ToJson(d)), d);
  const std::vector<AnnotatedDoc> docs = {d};
  WriteDocs(dir / "a.jsonl", docs);
  EXPECT_EQ(ReadDocs(dir / "a.jsonl"), docs);
  testing::WriteFile(dir / "dup.jsonl", ToJson(d) + "\n" + ToJson(d) + "\n");
  EXPECT_THROW(ReadDocs(dir / "dup.jsonl"), InputError);
  testing::WriteFile(dir / "bad.jsonl", "{\"doc_id\": 3}\n");
  EXPECT_THROW(ReadDocs(dir / "bad.jsonl"), InputError);
}

TEST(JsonTest, SpansAreCodePoints) {
  AnnotatedDoc d;
  d.doc_id = "ar";
  d.text = "هاجم المتمردون البلدة.";
  d.sentences = {{0, 22}};
  d.entities = {{"E1", {5, 14}, "ORG"}};
  d.triggers = {{"T1", {0, 4}, "Attack"}};
  d.arguments = {{"T1", "E1", "Attacker"}};
  const auto inst = BuildArl(d);
  ASSERT_EQ(inst.size(), 1u);
  EXPECT_EQ(inst[0].label, "Attacker");
  EXPECT_NE(ToJson(inst[0]).find("\"arl\""), std::string::npos);
}

}  // namespace
}  // namespace enar::ie
