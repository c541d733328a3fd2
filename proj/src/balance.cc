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

#include "enar/balance.h"

#include <omp.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "enar/errors.h"

namespace enar::balance {

BalancePlan BalancePlan::Default() {
  BalancePlan plan;
  plan.Set(Lang::kAr, Source::kWiki, 5);
  plan.Set(Lang::kAr, Source::kGigaword, 3);
  return plan;
}

namespace {

BalancePlan FromTable(const toml::table& root) {
  BalancePlan plan;
  const toml::table* table = root["multipliers"].as_table();
  if (table == nullptr) {
    throw ConfigError("balance plan has no [multipliers] table");
  }
  for (const auto& [key, node] : *table) {
    const std::string name(key.str());
    const auto dot = name.find('.');
    if (dot == std::string::npos) {
      throw ConfigError("plan key '" + name + "' is not <lang>.<source>");
    }
    const auto value = node.value<std::int64_t>();
    if (!value) {
      throw ConfigError("plan value for '" + name + "' is not an integer");
    }
    plan.Set(ParseLang(name.substr(0, dot)), ParseSource(name.substr(dot + 1)),
             static_cast<int>(*value));
  }
  return plan;
}

}  // namespace

BalancePlan BalancePlan::FromTomlString(std::string_view toml_text) {
  try {
    return FromTable(toml::parse(toml_text));
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string("invalid plan TOML: ") +
                      std::string(e.description()));
  }
}

BalancePlan BalancePlan::FromToml(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open plan " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return FromTomlString(text);
}

void BalancePlan::Set(Lang lang, Source source, int multiplier) {
  if (multiplier < 1) {
    throw ConfigError("multiplier for " + std::string(LangName(lang)) + "." +
                      std::string(SourceName(source)) + " must be >= 1");
  }
  multipliers_[{lang, source}] = multiplier;
}

int BalancePlan::Multiplier(Lang lang, Source source) const {
  const auto it = multipliers_.find({lang, source});
  return it == multipliers_.end() ? 1 : it->second;
}

int BalancePlan::MaxMultiplier() const {
  int m = 1;
  for (const auto& [key, value] : multipliers_) m = std::max(m, value);
  return m;
}

Counts CorpusStats::ForLang(Lang lang) const {
  Counts c;
  for (const auto& cell : cells[static_cast<int>(lang)]) c += cell;
  return c;
}

Counts CorpusStats::Total() const {
  Counts c = ForLang(Lang::kEn);
  c += ForLang(Lang::kAr);
  return c;
}

CorpusStats& CorpusStats::operator+=(const CorpusStats& o) {
  for (int l = 0; l < 2; ++l) {
    for (int s = 0; s < 4; ++s) cells[l][s] += o.cells[l][s];
  }
  return *this;
}

std::string CorpusStats::ToJson() const {
  nlohmann::ordered_json j;
  const Counts total = Total();
  j["tokens"]["all"] = total.tokens;
  j["sentences"]["all"] = total.sentences;
  for (const Lang lang : {Lang::kEn, Lang::kAr}) {
    const Counts c = ForLang(lang);
    j["tokens"][std::string(LangName(lang))] = c.tokens;
    j["sentences"][std::string(LangName(lang))] = c.sentences;
  }
  for (const Lang lang : {Lang::kEn, Lang::kAr}) {
    for (const Source source : {Source::kGigaword, Source::kWiki,
                                Source::kOscar, Source::kOther}) {
      const Counts& c = Cell(lang, source);
      const std::string key =
          std::string(LangName(lang)) + "." + std::string(SourceName(source));
      j["per_source"][key]["tokens"] = c.tokens;
      j["per_source"][key]["sentences"] = c.sentences;
    }
  }
  return j.dump(2);
}

std::string RepeatDocId(const std::string& doc_id, int repeat) {
  if (repeat == 0) return doc_id;
  return doc_id + "#r" + std::to_string(repeat);
}

std::vector<Sentence> Upsample(std::span<const Sentence> sentences,
                               const BalancePlan& plan) {
  std::vector<Sentence> out;
  const int passes = plan.MaxMultiplier();
  for (int r = 0; r < passes; ++r) {
    for (const Sentence& s : sentences) {
      if (plan.Multiplier(s.lang, s.source) <= r) continue;
      Sentence copy = s;
      copy.doc_id = RepeatDocId(s.doc_id, r);
      out.push_back(std::move(copy));
    }
  }
  return out;
}

std::uint64_t UpsampleFile(const std::filesystem::path& in,
                           const std::filesystem::path& out,
                           const BalancePlan& plan) {
  std::ofstream os(out, std::ios::binary);
  if (!os) throw InputError("cannot write " + out.string());
  std::uint64_t written = 0;
  const int passes = plan.MaxMultiplier();
  for (int r = 0; r < passes; ++r) {
    std::ifstream is(in, std::ios::binary);
    if (!is) throw InputError("cannot open " + in.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      Sentence s;
      try {
        s = corpus::SentenceFromJson(line);
      } catch (const std::exception& e) {
        throw InputError(in.string() + ":" + std::to_string(line_no) + ": " +
                         e.what());
      }
      if (plan.Multiplier(s.lang, s.source) <= r) continue;
      s.doc_id = RepeatDocId(s.doc_id, r);
      os << corpus::ToJson(s) << '\n';
      ++written;
    }
  }
  if (!os) throw InputError("write failed: " + out.string());
  return written;
}

CorpusStats CountSerial(std::span<const Sentence> sentences) {
  CorpusStats stats;
  for (const Sentence& s : sentences) {
    Counts& c = stats.Cell(s.lang, s.source);
    c.tokens += s.tokens.size();
    c.sentences += 1;
  }
  return stats;
}

CorpusStats Count(std::span<const Sentence> sentences, int threads) {
  CorpusStats stats;
  const auto n = static_cast<std::int64_t>(sentences.size());
#pragma omp parallel num_threads(std::max(1, threads))
  {
    CorpusStats local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const Sentence& s = sentences[i];
      Counts& c = local.Cell(s.lang, s.source);
      c.tokens += s.tokens.size();
      c.sentences += 1;
    }
#pragma omp critical(enar_count_merge)
    stats += local;
  }
  return stats;
}

}  // namespace enar::balance
