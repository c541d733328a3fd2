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

#ifndef ENAR_BALANCE_H_
#define ENAR_BALANCE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "enar/corpus.h"

namespace enar::balance {

// Integer repeat counts per (lang, source). Unlisted pairs repeat once.
class BalancePlan {
 public:
  BalancePlan() = default;

  // (ar, wiki) x5 and (ar, gigaword) x3; everything else x1.
  static BalancePlan Default();

  // TOML with a [multipliers] table keyed "<lang>.<source>", e.g.
  //   [multipliers]
  //   "ar.wiki" = 5
  static BalancePlan FromToml(const std::filesystem::path& path);
  static BalancePlan FromTomlString(std::string_view toml);

  // Throws ConfigError if `multiplier` < 1.
  void Set(Lang lang, Source source, int multiplier);
  int Multiplier(Lang lang, Source source) const;
  int MaxMultiplier() const;

  const std::map<std::pair<Lang, Source>, int>& multipliers() const {
    return multipliers_;
  }

 private:
  std::map<std::pair<Lang, Source>, int> multipliers_;
};

struct Counts {
  std::uint64_t tokens = 0;
  std::uint64_t sentences = 0;

  Counts& operator+=(const Counts& o) {
    tokens += o.tokens;
    sentences += o.sentences;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

// Exact whitespace-token and sentence counts. Totals are derived from the
// per-(lang, source) cells, so they always equal the sum of the breakdown.
struct CorpusStats {
  // Indexed [lang][source] in enum order.
  std::array<std::array<Counts, 4>, 2> cells{};

  const Counts& Cell(Lang lang, Source source) const {
    return cells[static_cast<int>(lang)][static_cast<int>(source)];
  }
  Counts& Cell(Lang lang, Source source) {
    return cells[static_cast<int>(lang)][static_cast<int>(source)];
  }
  Counts ForLang(Lang lang) const;
  Counts Total() const;

  CorpusStats& operator+=(const CorpusStats& o);
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;

  std::string ToJson() const;
};

// Repeats every sentence `plan.Multiplier(lang, source)` times. Output is
// round-robin over repeats: pass r emits, in input order, each sentence
// whose multiplier exceeds r. Pass 0 is the unchanged input; later passes
// suffix the doc id with "#r<r>".
std::vector<Sentence> Upsample(std::span<const Sentence> sentences,
                               const BalancePlan& plan);

// Streaming variant over a sentence JSONL file: one read pass per repeat.
// Returns the number of sentences written.
std::uint64_t UpsampleFile(const std::filesystem::path& in,
                           const std::filesystem::path& out,
                           const BalancePlan& plan);

std::string RepeatDocId(const std::string& doc_id, int repeat);

CorpusStats CountSerial(std::span<const Sentence> sentences);
// OpenMP reduction; equal to CountSerial for every thread count.
CorpusStats Count(std::span<const Sentence> sentences, int threads);

}  // namespace enar::balance

#endif  // ENAR_BALANCE_H_
