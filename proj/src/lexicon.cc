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

#include "enar/lexicon.h"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "enar/errors.h"
#include "enar/unicode.h"

namespace enar::lexicon {

std::string_view TierName(Tier tier) {
  switch (tier) {
    case Tier::kWiki:
      return "wiki";
    case Tier::kPanlex:
      return "panlex";
    case Tier::kMuse:
      break;
  }
  return "muse";
}

Tier ParseTier(std::string_view name) {
  if (name == "wiki") return Tier::kWiki;
  if (name == "panlex") return Tier::kPanlex;
  if (name == "muse") return Tier::kMuse;
  throw ConfigError("unknown dictionary '" + std::string(name) +
                    "' (expected wiki, panlex or muse)");
}

Format ParseFormat(std::string_view name) {
  if (name == "muse") return Format::kMuse;
  if (name == "panlex") return Format::kPanlex;
  if (name == "wiki-titles") return Format::kWikiTitles;
  if (name == "canonical") return Format::kCanonical;
  throw ConfigError("unknown lexicon format '" + std::string(name) + "'");
}

Tier FormatTier(Format format) {
  switch (format) {
    case Format::kWikiTitles:
      return Tier::kWiki;
    case Format::kPanlex:
      return Tier::kPanlex;
    case Format::kMuse:
    case Format::kCanonical:
      break;
  }
  return Tier::kMuse;
}

std::string DirectionName(Direction d) {
  return std::string(LangName(d.from)) + "-" + std::string(LangName(d.to));
}

Direction ParseDirection(std::string_view name) {
  const auto dash = name.find('-');
  if (dash == std::string_view::npos) {
    throw ConfigError("direction must look like en-ar, got '" +
                      std::string(name) + "'");
  }
  Direction d{ParseLang(name.substr(0, dash)), ParseLang(name.substr(dash + 1))};
  if (d.from == d.to) throw ConfigError("direction languages must differ");
  return d;
}

namespace {

std::string NormalizePhrase(std::string_view phrase) {
  return unicode::CollapseWhitespace(unicode::Nfc(phrase));
}

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

void BilingualLexicon::Add(std::string_view source, std::string_view target,
                           Tier tier) {
  std::string src = NormalizePhrase(source);
  std::string tgt = NormalizePhrase(target);
  if (src.empty() || tgt.empty()) throw InputError("empty lexicon phrase");
  auto& list = entries_[std::move(src)];
  Translation t{std::move(tgt), tier};
  const auto it = std::lower_bound(list.begin(), list.end(), t);
  if (it == list.end() || *it != t) list.insert(it, std::move(t));
}

std::span<const Translation> BilingualLexicon::Lookup(
    std::string_view source) const {
  const auto it = entries_.find(source);
  if (it == entries_.end()) return {};
  return it->second;
}

std::string StripDisambiguator(std::string_view title) {
  std::string s = unicode::CollapseWhitespace(title);
  while (!s.empty() && s.back() == ')') {
    const auto open = s.rfind('(');
    if (open == std::string::npos || open == 0) break;
    std::string head = unicode::CollapseWhitespace(s.substr(0, open));
    if (head.empty()) break;
    s = std::move(head);
  }
  return s;
}

LoadResult LoadFromString(std::string_view text, Format format,
                          Direction direction) {
  if (direction.from == direction.to) {
    throw ConfigError("direction languages must differ");
  }
  LoadResult result{BilingualLexicon(direction), {}};
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto warn = [&](std::string message) {
    result.warnings.push_back({line_no, std::move(message)});
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (unicode::CollapseWhitespace(line).empty()) continue;
    if (unicode::FindInvalidUtf8(line)) {
      warn("malformed UTF-8");
      continue;
    }
    std::string src;
    std::string tgt;
    Tier tier = FormatTier(format);
    if (format == Format::kMuse) {
      const auto fields = unicode::SplitWhitespace(line);
      if (fields.size() != 2) {
        warn("expected 2 whitespace-separated fields, found " +
             std::to_string(fields.size()));
        continue;
      }
      src = fields[0];
      tgt = fields[1];
    } else {
      const auto fields = SplitTabs(line);
      const std::size_t expected = format == Format::kCanonical ? 3 : 2;
      if (fields.size() != expected) {
        warn("expected " + std::to_string(expected) +
             " tab-separated fields, found " + std::to_string(fields.size()));
        continue;
      }
      src = fields[0];
      tgt = fields[1];
      if (format == Format::kWikiTitles) {
        src = StripDisambiguator(src);
        tgt = StripDisambiguator(tgt);
        if (direction.from == Lang::kAr) std::swap(src, tgt);
      } else if (format == Format::kCanonical) {
        try {
          tier = ParseTier(fields[2]);
        } catch (const ConfigError& e) {
          warn(e.what());
          continue;
        }
      }
    }
    if (NormalizePhrase(src).empty() || NormalizePhrase(tgt).empty()) {
      warn("empty phrase");
      continue;
    }
    result.lexicon.Add(src, tgt, tier);
  }
  if (result.lexicon.empty()) {
    throw InputError("lexicon has no valid entries");
  }
  return result;
}

LoadResult Load(const std::filesystem::path& path, Format format,
                Direction direction) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  try {
    return LoadFromString(text, format, direction);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string ToCanonical(const BilingualLexicon& lex) {
  std::string out;
  for (const auto& [src, list] : lex.entries()) {
    for (const auto& t : list) {
      out.append(src).append("\t").append(t.target).append("\t");
      out.append(TierName(t.tier)).append("\n");
    }
  }
  return out;
}

void Save(const BilingualLexicon& lex, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << ToCanonical(lex);
  if (!out) throw InputError("write failed: " + path.string());
}

BilingualLexicon Merge(std::span<const BilingualLexicon> lexicons) {
  if (lexicons.empty()) throw ConfigError("nothing to merge");
  BilingualLexicon merged(lexicons.front().direction());
  for (const auto& lex : lexicons) {
    if (lex.direction() != merged.direction()) {
      throw ConfigError("cannot merge " + DirectionName(lex.direction()) +
                        " lexicon into " + DirectionName(merged.direction()));
    }
    for (const auto& [src, list] : lex.entries()) {
      for (const auto& t : list) merged.Add(src, t.target, t.tier);
    }
  }
  return merged;
}

BilingualLexicon Invert(const BilingualLexicon& lex) {
  BilingualLexicon inverted({lex.direction().to, lex.direction().from});
  for (const auto& [src, list] : lex.entries()) {
    for (const auto& t : list) inverted.Add(t.target, src, t.tier);
  }
  return inverted;
}

BilingualLexicon Restrict(const BilingualLexicon& lex,
                          std::span<const Tier> tiers) {
  BilingualLexicon out(lex.direction());
  for (const auto& [src, list] : lex.entries()) {
    for (const auto& t : list) {
      if (std::find(tiers.begin(), tiers.end(), t.tier) != tiers.end()) {
        out.Add(src, t.target, t.tier);
      }
    }
  }
  return out;
}

LexiconStats Stats(const BilingualLexicon& lex) {
  LexiconStats stats;
  for (const auto& [src, list] : lex.entries()) {
    std::array<std::size_t, 3> per_tier{};
    for (const auto& t : list) ++per_tier[static_cast<int>(t.tier)];
    for (int k = 0; k < 3; ++k) {
      if (per_tier[k] == 0) continue;
      ++stats.tiers[k].entries;
      stats.tiers[k].translations += per_tier[k];
    }
  }
  for (auto& t : stats.tiers) {
    t.mean_translations =
        t.entries == 0 ? 0.0
                       : static_cast<double>(t.translations) /
                             static_cast<double>(t.entries);
  }
  return stats;
}

std::string LexiconStats::ToJson() const {
  nlohmann::ordered_json j;
  for (const Tier tier : kAllTiers) {
    const TierStats& t = tiers[static_cast<int>(tier)];
    auto& node = j[std::string(TierName(tier))];
    node["entries"] = t.entries;
    node["translations"] = t.translations;
    node["mean_translations"] = t.mean_translations;
  }
  return j.dump(2);
}

}  // namespace enar::lexicon
