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

#ifndef ENAR_CODESWITCH_H_
#define ENAR_CODESWITCH_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "enar/corpus.h"
#include "enar/lexicon.h"

namespace enar::codeswitch {

// Experiment naming only: s1 trains from scratch, s2 continues training.
enum class Mode { kFromScratch, kContinued };

struct CodeSwitchConfig {
  double sentence_threshold = 0.5;
  double token_threshold = 0.3;
  std::vector<lexicon::Tier> dictionaries = {
      lexicon::Tier::kWiki, lexicon::Tier::kPanlex, lexicon::Tier::kMuse};
  std::uint64_t seed = 42;
  Mode mode = Mode::kContinued;
  // Match lexicon keys after uncased folding.
  bool case_insensitive = true;

  // Throws ConfigError.
  void Validate() const;
  // "s{1|2}-{sent}-{tok}-{dicts}".
  std::string Name() const;
  // A [codeswitch] TOML section readable by `enar --config`.
  std::string ToToml() const;
};

// Shortest round-trip decimal with at least one fractional digit:
// 0.5 -> "0.5", 1 -> "1.0", 0.001 -> "0.001".
std::string FormatThreshold(double value);

// "all" for all three tiers, otherwise the letters p, m, w of the enabled
// tiers in that order ("pm", "mw", "m", ...).
std::string DictionaryCode(std::span<const lexicon::Tier> tiers);
std::vector<lexicon::Tier> ParseDictionaryCode(std::string_view code);

// The 18 configurations of the code-switching ablation grid.
std::vector<CodeSwitchConfig> ConfigMatrix();

struct Replacement {
  std::size_t begin = 0;   // first replaced input word
  std::size_t length = 0;  // replaced input words
  std::string source;      // matched lexicon key
  std::string target;
  lexicon::Tier tier = lexicon::Tier::kWiki;
};

struct SentenceTrace {
  bool selected = false;
  std::size_t word_count = 0;
  std::size_t budget = 0;
  std::vector<Replacement> replacements;

  std::size_t ReplacedWords() const;
};

struct SwitchReport {
  std::uint64_t sentences_total = 0;
  std::uint64_t sentences_selected = 0;
  std::uint64_t sentences_switched = 0;
  std::uint64_t words_total = 0;
  std::uint64_t tokens_replaced = 0;
  std::array<std::uint64_t, 3> replacements_per_tier{};

  double realized_sentence_fraction() const;
  void Add(const SentenceTrace& trace);
  std::string ToJson() const;
  friend bool operator==(const SwitchReport&, const SwitchReport&) = default;
};

struct AugmentResult {
  std::vector<Sentence> sentences;
  std::vector<SentenceTrace> traces;
  SwitchReport report;
};

// Immutable once built; Apply is safe to call from many threads.
class CodeSwitcher {
 public:
  // `en2ar` must map en->ar and `ar2en` ar->en. Only tiers enabled in
  // `config` are indexed.
  CodeSwitcher(const lexicon::BilingualLexicon& en2ar,
               const lexicon::BilingualLexicon& ar2en,
               CodeSwitchConfig config);

  const CodeSwitchConfig& config() const { return config_; }

  // Switches one sentence. Selection and translation choice draw from a
  // generator seeded by (config seed, doc id, sentence index).
  Sentence Apply(const Sentence& sentence, SentenceTrace* trace) const;

  // Matching key for a single input word: punctuation trimmed, folded when
  // case-insensitive. Empty when the word is pure punctuation.
  std::string WordKey(std::string_view word) const;

  // Translations for a key, grouped by tier. nullptr if none.
  using TierTargets = std::array<std::vector<std::string>, 3>;
  const TierTargets* Lookup(Lang from, const std::string& key) const;

 private:
  struct Index {
    std::unordered_map<std::string, TierTargets> phrases;
    std::size_t max_words = 0;
  };
  void Build(const lexicon::BilingualLexicon& lex, Index& index) const;

  CodeSwitchConfig config_;
  std::vector<lexicon::Tier> tier_order_;
  Index en2ar_;
  Index ar2en_;
};

AugmentResult AugmentSerial(std::span<const Sentence> sentences,
                            const CodeSwitcher& switcher);
// OpenMP over sentences; byte-identical to AugmentSerial.
AugmentResult Augment(std::span<const Sentence> sentences,
                      const CodeSwitcher& switcher, int threads);

}  // namespace enar::codeswitch

#endif  // ENAR_CODESWITCH_H_
