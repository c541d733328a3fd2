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

#ifndef ENAR_LEXICON_H_
#define ENAR_LEXICON_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "enar/corpus.h"

namespace enar::lexicon {

// Lower value = higher substitution priority.
enum class Tier { kWiki = 0, kPanlex = 1, kMuse = 2 };
inline constexpr std::array<Tier, 3> kAllTiers = {Tier::kWiki, Tier::kPanlex,
                                                  Tier::kMuse};

std::string_view TierName(Tier tier);
Tier ParseTier(std::string_view name);

enum class Format { kMuse, kPanlex, kWikiTitles, kCanonical };
Format ParseFormat(std::string_view name);
// The tier a source format loads into. kCanonical carries tiers per line.
Tier FormatTier(Format format);

struct Direction {
  Lang from = Lang::kEn;
  Lang to = Lang::kAr;
  friend bool operator==(const Direction&, const Direction&) = default;
};
std::string DirectionName(Direction d);  // "en-ar"
Direction ParseDirection(std::string_view name);

struct Translation {
  std::string target;
  Tier tier;
  friend auto operator<=>(const Translation& a, const Translation& b) {
    if (a.tier != b.tier) return a.tier <=> b.tier;
    return a.target <=> b.target;
  }
  friend bool operator==(const Translation&, const Translation&) = default;
};

// Source phrase -> translations, each list sorted by (tier, target) and
// free of duplicates. Phrases are NFC with single inner spaces.
class BilingualLexicon {
 public:
  using EntryMap =
      std::map<std::string, std::vector<Translation>, std::less<>>;

  explicit BilingualLexicon(Direction direction) : direction_(direction) {}

  void Add(std::string_view source, std::string_view target, Tier tier);

  Direction direction() const { return direction_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const EntryMap& entries() const {
    return entries_;
  }
  // Empty span when the phrase is absent.
  std::span<const Translation> Lookup(std::string_view source) const;

  friend bool operator==(const BilingualLexicon&,
                         const BilingualLexicon&) = default;

 private:
  Direction direction_;
  EntryMap entries_;
};

struct LoadWarning {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct LoadResult {
  BilingualLexicon lexicon;
  std::vector<LoadWarning> warnings;
};

// MUSE: "src tgt" separated by whitespace. PanLex: "src\ttgt". Wiki titles:
// "en_title\tar_title" (columns are swapped for an ar->en direction) with
// trailing parenthetical disambiguators removed. Canonical:
// "src\ttgt\ttier". Bad lines are skipped with a warning; a file with no
// valid entries throws InputError.
LoadResult Load(const std::filesystem::path& path, Format format,
                Direction direction);
LoadResult LoadFromString(std::string_view text, Format format,
                          Direction direction);

// Canonical TSV in entry order.
std::string ToCanonical(const BilingualLexicon& lex);
void Save(const BilingualLexicon& lex, const std::filesystem::path& path);

// Union keyed by source phrase. Throws ConfigError on direction mismatch.
BilingualLexicon Merge(std::span<const BilingualLexicon> lexicons);

BilingualLexicon Invert(const BilingualLexicon& lex);

// Keeps only translations whose tier is enabled; drops emptied entries.
BilingualLexicon Restrict(const BilingualLexicon& lex,
                          std::span<const Tier> tiers);

// "Mercury (planet)" -> "Mercury".
std::string StripDisambiguator(std::string_view title);

struct TierStats {
  std::size_t entries = 0;
  std::size_t translations = 0;
  // translations / entries, 0 when there are no entries.
  double mean_translations = 0.0;
};

struct LexiconStats {
  std::array<TierStats, 3> tiers{};
  std::string ToJson() const;
};

LexiconStats Stats(const BilingualLexicon& lex);

}  // namespace enar::lexicon

#endif  // ENAR_LEXICON_H_
