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

#include "enar/codeswitch.h"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

#include "enar/errors.h"
#include "enar/random.h"
#include "enar/unicode.h"

namespace enar::codeswitch {

using lexicon::Tier;

namespace {

// floor(threshold * n), tolerant of representation error such as
// 0.29 * 100 = 28.999999999999996.
std::size_t FloorProduct(double threshold, std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(threshold * static_cast<double>(n) + 1e-9));
}

std::string JoinSpace(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

// Splits a word into (leading punctuation, core, trailing punctuation).
struct Affixes {
  std::string prefix;
  std::string core;
  std::string suffix;
};

Affixes SplitAffixes(std::string_view word) {
  const std::u32string cps = unicode::Decode(word);
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && unicode::IsPunctuation(cps[b])) ++b;
  while (e > b && unicode::IsPunctuation(cps[e - 1])) --e;
  const std::u32string_view view = cps;
  return {unicode::Encode(view.substr(0, b)),
          unicode::Encode(view.substr(b, e - b)),
          unicode::Encode(view.substr(e))};
}

}  // namespace

void CodeSwitchConfig::Validate() const {
  if (!(sentence_threshold >= 0.0 && sentence_threshold <= 1.0)) {
    throw ConfigError("sentence threshold must be in [0, 1]");
  }
  if (!(token_threshold >= 0.0 && token_threshold <= 1.0)) {
    throw ConfigError("token threshold must be in [0, 1]");
  }
  if (dictionaries.empty()) {
    throw ConfigError("at least one dictionary must be enabled");
  }
}

std::string FormatThreshold(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string DictionaryCode(std::span<const Tier> tiers) {
  auto has = [&](Tier t) {
    return std::find(tiers.begin(), tiers.end(), t) != tiers.end();
  };
  if (has(Tier::kWiki) && has(Tier::kPanlex) && has(Tier::kMuse)) return "all";
  std::string code;
  if (has(Tier::kPanlex)) code += 'p';
  if (has(Tier::kMuse)) code += 'm';
  if (has(Tier::kWiki)) code += 'w';
  return code;
}

std::vector<Tier> ParseDictionaryCode(std::string_view code) {
  if (code == "all") return {Tier::kWiki, Tier::kPanlex, Tier::kMuse};
  std::vector<Tier> tiers;
  for (const char c : code) {
    Tier t;
    switch (c) {
      case 'p':
        t = Tier::kPanlex;
        break;
      case 'm':
        t = Tier::kMuse;
        break;
      case 'w':
        t = Tier::kWiki;
        break;
      default:
        throw ConfigError("bad dictionary code '" + std::string(code) + "'");
    }
    if (std::find(tiers.begin(), tiers.end(), t) == tiers.end()) {
      tiers.push_back(t);
    }
  }
  if (tiers.empty()) throw ConfigError("empty dictionary code");
  std::sort(tiers.begin(), tiers.end());
  return tiers;
}

std::string CodeSwitchConfig::Name() const {
  return std::string(mode == Mode::kFromScratch ? "s1" : "s2") + "-" +
         FormatThreshold(sentence_threshold) + "-" +
         FormatThreshold(token_threshold) + "-" + DictionaryCode(dictionaries);
}

std::string CodeSwitchConfig::ToToml() const {
  std::string out = "# " + Name() + "\n[codeswitch]\n";
  out += "sent = " + FormatThreshold(sentence_threshold) + "\n";
  out += "tok = " + FormatThreshold(token_threshold) + "\n";
  out += "dicts = [";
  for (std::size_t i = 0; i < dictionaries.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + std::string(lexicon::TierName(dictionaries[i])) + "\"";
  }
  out += "]\n";
  out += "mode = \"" +
         std::string(mode == Mode::kFromScratch ? "s1" : "s2") + "\"\n";
  out += "seed = " + std::to_string(seed) + "\n";
  return out;
}

std::vector<CodeSwitchConfig> ConfigMatrix() {
  struct Row {
    double sent;
    double tok;
    std::string_view dicts;
  };
  static constexpr Row kRows[] = {
      {0.5, 0.3, "all"}, {1.0, 0.5, "all"},   {0.5, 0.3, "pm"},
      {0.5, 0.3, "m"},   {0.5, 0.1, "mw"},    {0.5, 0.3, "mw"},
      {1.0, 0.3, "mw"},  {1.0, 0.001, "mw"},  {0.5, 0.3, "w"},
  };
  std::vector<CodeSwitchConfig> out;
  for (const Mode mode : {Mode::kFromScratch, Mode::kContinued}) {
    for (const Row& row : kRows) {
      CodeSwitchConfig c;
      c.mode = mode;
      c.sentence_threshold = row.sent;
      c.token_threshold = row.tok;
      c.dictionaries = ParseDictionaryCode(row.dicts);
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::size_t SentenceTrace::ReplacedWords() const {
  std::size_t n = 0;
  for (const auto& r : replacements) n += r.length;
  return n;
}

double SwitchReport::realized_sentence_fraction() const {
  return sentences_total == 0 ? 0.0
                              : static_cast<double>(sentences_switched) /
                                    static_cast<double>(sentences_total);
}

void SwitchReport::Add(const SentenceTrace& trace) {
  ++sentences_total;
  words_total += trace.word_count;
  if (trace.selected) ++sentences_selected;
  if (!trace.replacements.empty()) ++sentences_switched;
  for (const auto& r : trace.replacements) {
    tokens_replaced += r.length;
    ++replacements_per_tier[static_cast<int>(r.tier)];
  }
}

std::string SwitchReport::ToJson() const {
  nlohmann::ordered_json j;
  j["sentences_total"] = sentences_total;
  j["sentences_selected"] = sentences_selected;
  j["sentences_switched"] = sentences_switched;
  j["realized_sentence_fraction"] = realized_sentence_fraction();
  j["words_total"] = words_total;
  j["tokens_replaced"] = tokens_replaced;
  for (const Tier t : lexicon::kAllTiers) {
    j["replacements_per_tier"][std::string(lexicon::TierName(t))] =
        replacements_per_tier[static_cast<int>(t)];
  }
  return j.dump(2);
}

CodeSwitcher::CodeSwitcher(const lexicon::BilingualLexicon& en2ar,
                           const lexicon::BilingualLexicon& ar2en,
                           CodeSwitchConfig config)
    : config_(std::move(config)) {
  config_.Validate();
  if (en2ar.direction() != lexicon::Direction{Lang::kEn, Lang::kAr}) {
    throw ConfigError("English sentences need an en-ar lexicon, got " +
                      lexicon::DirectionName(en2ar.direction()));
  }
  if (ar2en.direction() != lexicon::Direction{Lang::kAr, Lang::kEn}) {
    throw ConfigError("Arabic sentences need an ar-en lexicon, got " +
                      lexicon::DirectionName(ar2en.direction()));
  }
  tier_order_ = config_.dictionaries;
  std::sort(tier_order_.begin(), tier_order_.end());
  tier_order_.erase(std::unique(tier_order_.begin(), tier_order_.end()),
                    tier_order_.end());
  Build(en2ar, en2ar_);
  Build(ar2en, ar2en_);
}

std::string CodeSwitcher::WordKey(std::string_view word) const {
  std::string core = SplitAffixes(word).core;
  if (core.empty()) return core;
  return config_.case_insensitive ? unicode::FoldUncased(core)
                                  : unicode::Nfc(core);
}

void CodeSwitcher::Build(const lexicon::BilingualLexicon& lex,
                         Index& index) const {
  for (const auto& [source, list] : lex.entries()) {
    std::vector<std::string> words;
    bool usable = true;
    for (const auto& w : unicode::SplitWhitespace(source)) {
      words.push_back(WordKey(w));
      usable = usable && !words.back().empty();
    }
    if (!usable || words.empty()) continue;
    const std::string key = JoinSpace(words);
    for (const auto& t : list) {
      if (std::find(tier_order_.begin(), tier_order_.end(), t.tier) ==
          tier_order_.end()) {
        continue;
      }
      auto& targets = index.phrases[key][static_cast<int>(t.tier)];
      const auto it =
          std::lower_bound(targets.begin(), targets.end(), t.target);
      if (it == targets.end() || *it != t.target) {
        targets.insert(it, t.target);
      }
      index.max_words = std::max(index.max_words, words.size());
    }
  }
}

const CodeSwitcher::TierTargets* CodeSwitcher::Lookup(
    Lang from, const std::string& key) const {
  const Index& index = from == Lang::kEn ? en2ar_ : ar2en_;
  const auto it = index.phrases.find(key);
  return it == index.phrases.end() ? nullptr : &it->second;
}

Sentence CodeSwitcher::Apply(const Sentence& sentence,
                             SentenceTrace* trace) const {
  SentenceTrace local;
  SentenceTrace& t = trace ? *trace : local;
  t = SentenceTrace{};

  const std::size_t n = sentence.tokens.size();
  t.word_count = n;
  t.budget = FloorProduct(config_.token_threshold, n);

  Rng rng(DeriveSeed(config_.seed, "codeswitch", sentence.doc_id,
                     sentence.index));
  t.selected = rng.Bernoulli(config_.sentence_threshold);
  if (!t.selected || t.budget == 0 || n == 0) return sentence;

  const Index& index = sentence.lang == Lang::kEn ? en2ar_ : ar2en_;
  std::vector<std::string> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = WordKey(sentence.tokens[i]);

  std::vector<bool> used(n, false);
  std::size_t spent = 0;
  const std::size_t longest = std::min(index.max_words, n);
  for (const Tier tier : tier_order_) {
    for (std::size_t len = longest; len >= 1; --len) {
      if (spent + len > t.budget) continue;
      for (std::size_t begin = 0; begin + len <= n; ++begin) {
        if (spent + len > t.budget) break;
        bool free = true;
        for (std::size_t k = begin; k < begin + len && free; ++k) {
          free = !used[k] && !keys[k].empty();
        }
        if (!free) continue;
        std::string key = keys[begin];
        for (std::size_t k = begin + 1; k < begin + len; ++k) {
          key.push_back(' ');
          key += keys[k];
        }
        const auto it = index.phrases.find(key);
        if (it == index.phrases.end()) continue;
        const auto& targets = it->second[static_cast<int>(tier)];
        if (targets.empty()) continue;
        const std::string& target = targets[rng.UniformInt(targets.size())];
        for (std::size_t k = begin; k < begin + len; ++k) used[k] = true;
        spent += len;
        t.replacements.push_back({begin, len, std::move(key), target, tier});
      }
    }
  }
  if (t.replacements.empty()) return sentence;

  std::sort(t.replacements.begin(), t.replacements.end(),
            [](const Replacement& a, const Replacement& b) {
              return a.begin < b.begin;
            });
  Sentence out = sentence;
  out.tokens.clear();
  std::size_t next = 0;
  for (const Replacement& r : t.replacements) {
    while (next < r.begin) out.tokens.push_back(sentence.tokens[next++]);
    std::vector<std::string> words = unicode::SplitWhitespace(r.target);
    words.front().insert(0, SplitAffixes(sentence.tokens[r.begin]).prefix);
    words.back() += SplitAffixes(sentence.tokens[r.begin + r.length - 1]).suffix;
    for (auto& w : words) out.tokens.push_back(std::move(w));
    next = r.begin + r.length;
  }
  while (next < n) out.tokens.push_back(sentence.tokens[next++]);
  out.raw = JoinSpace(out.tokens);
  return out;
}

AugmentResult AugmentSerial(std::span<const Sentence> sentences,
                            const CodeSwitcher& switcher) {
  AugmentResult result;
  result.sentences.reserve(sentences.size());
  result.traces.resize(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    result.sentences.push_back(
        switcher.Apply(sentences[i], &result.traces[i]));
    result.report.Add(result.traces[i]);
  }
  return result;
}

AugmentResult Augment(std::span<const Sentence> sentences,
                      const CodeSwitcher& switcher, int threads) {
  AugmentResult result;
  result.sentences.resize(sentences.size());
  result.traces.resize(sentences.size());
  const auto n = static_cast<std::int64_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(std::max(1, threads))
  for (std::int64_t i = 0; i < n; ++i) {
    result.sentences[i] = switcher.Apply(sentences[i], &result.traces[i]);
  }
  for (const auto& trace : result.traces) result.report.Add(trace);
  return result;
}

}  // namespace enar::codeswitch
