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

#include "enar/corpus.h"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "enar/errors.h"
#include "enar/unicode.h"

namespace enar {

namespace {
// Generated from data/en_abbreviations.txt at configure time.
#include "en_abbreviations.inc"
}  // namespace

std::string_view LangName(Lang lang) {
  return lang == Lang::kEn ? "en" : "ar";
}

std::string_view SourceName(Source source) {
  switch (source) {
    case Source::kGigaword:
      return "gigaword";
    case Source::kWiki:
      return "wiki";
    case Source::kOscar:
      return "oscar";
    case Source::kOther:
      break;
  }
  return "other";
}

std::string_view ScriptName(Script script) {
  switch (script) {
    case Script::kEn:
      return "en";
    case Script::kAr:
      return "ar";
    case Script::kOther:
      break;
  }
  return "other";
}

Lang ParseLang(std::string_view name) {
  if (name == "en") return Lang::kEn;
  if (name == "ar") return Lang::kAr;
  throw ConfigError("unknown language '" + std::string(name) +
                    "' (expected en or ar)");
}

Source ParseSource(std::string_view name) {
  if (name == "gigaword") return Source::kGigaword;
  if (name == "wiki") return Source::kWiki;
  if (name == "oscar") return Source::kOscar;
  if (name == "other") return Source::kOther;
  throw ConfigError("unknown source '" + std::string(name) + "'");
}

namespace corpus {
namespace {

using nlohmann::ordered_json;

bool IsBlank(std::string_view line) {
  return unicode::CollapseWhitespace(line).empty();
}

std::string DerivedId(Source source, Lang lang,
                      const std::filesystem::path& path, std::size_t ordinal) {
  std::string id;
  id.append(SourceName(source)).append(":");
  id.append(LangName(lang)).append(":");
  id.append(path.filename().string()).append(":");
  id.append(std::to_string(ordinal));
  return id;
}

void IngestPlain(std::istream& in, const std::filesystem::path& path,
                 Source source, Lang lang, const DocumentSink& on_doc,
                 const ErrorSink& on_error) {
  std::string line;
  std::string block;
  std::size_t offset = 0;
  std::size_t block_offset = 0;
  std::size_t ordinal = 0;

  auto flush = [&]() {
    if (block.empty()) return;
    const std::size_t record = ordinal++;
    if (auto bad = unicode::FindInvalidUtf8(block)) {
      on_error({path.string(), record, block_offset + *bad,
                "malformed UTF-8"});
    } else {
      Document doc;
      doc.id = DerivedId(source, lang, path, record);
      doc.lang = lang;
      doc.source = source;
      doc.text = unicode::Nfc(block);
      on_doc(std::move(doc));
    }
    block.clear();
  };

  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (IsBlank(line)) {
      flush();
      continue;
    }
    if (block.empty()) {
      block_offset = line_offset;
    } else {
      block.push_back('\n');
    }
    block.append(line);
  }
  flush();
}

void IngestJsonl(std::istream& in, const std::filesystem::path& path,
                 Source source, Lang lang, const DocumentSink& on_doc,
                 const ErrorSink& on_error) {
  std::string line;
  std::size_t offset = 0;
  std::size_t ordinal = 0;
  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (IsBlank(line)) continue;
    const std::size_t record = ordinal++;
    if (auto bad = unicode::FindInvalidUtf8(line)) {
      on_error({path.string(), record, line_offset + *bad, "malformed UTF-8"});
      continue;
    }
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      on_error({path.string(), record, line_offset,
                std::string("invalid JSON: ") + e.what()});
      continue;
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
      on_error({path.string(), record, line_offset,
                "record has no string field \"text\""});
      continue;
    }
    Document doc;
    doc.text = unicode::Nfc(j["text"].get<std::string>());
    if (IsBlank(doc.text)) {
      on_error({path.string(), record, line_offset, "empty text"});
      continue;
    }
    try {
      doc.lang = j.contains("lang") ? ParseLang(j["lang"].get<std::string>())
                                    : lang;
      doc.source = j.contains("source")
                       ? ParseSource(j["source"].get<std::string>())
                       : source;
    } catch (const std::exception& e) {
      on_error({path.string(), record, line_offset, e.what()});
      continue;
    }
    if (j.contains("id") && j["id"].is_string()) {
      doc.id = j["id"].get<std::string>();
    } else {
      doc.id = DerivedId(doc.source, doc.lang, path, record);
    }
    on_doc(std::move(doc));
  }
}

// Drops closing quotes and brackets that may follow a terminator.
std::u32string StripClosers(std::u32string s) {
  static constexpr std::u32string_view kClosers =
      U"\"')]}”’»";
  while (!s.empty() && kClosers.find(s.back()) != std::u32string_view::npos) {
    s.pop_back();
  }
  return s;
}

bool IsTerminator(char32_t cp, Lang lang) {
  if (cp == U'.' || cp == U'!' || cp == U'?') return true;
  return lang == Lang::kAr && (cp == U'؟' || cp == U'۔');
}

struct TokenSpan {
  std::size_t begin;
  std::size_t end;
};

std::vector<TokenSpan> TokenSpans(std::string_view text) {
  std::vector<TokenSpan> spans;
  const std::vector<std::string> tokens = unicode::SplitWhitespace(text);
  std::size_t cursor = 0;
  for (const auto& tok : tokens) {
    const std::size_t at = text.find(tok, cursor);
    spans.push_back({at, at + tok.size()});
    cursor = at + tok.size();
  }
  return spans;
}

}  // namespace

void IngestFile(const std::filesystem::path& path, Source source, Lang lang,
                const DocumentSink& on_doc, const ErrorSink& on_error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  if (path.extension() == ".jsonl") {
    IngestJsonl(in, path, source, lang, on_doc, on_error);
  } else {
    IngestPlain(in, path, source, lang, on_doc, on_error);
  }
}

void Ingest(const std::filesystem::path& path, Source source, Lang lang,
            const DocumentSink& on_doc, const ErrorSink& on_error) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw InputError("no such path: " + path.string());
  if (!fs::is_directory(path)) {
    IngestFile(path, source, lang, on_doc, on_error);
    return;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) IngestFile(f, source, lang, on_doc, on_error);
}

IngestResult Ingest(const std::filesystem::path& path, Source source,
                    Lang lang) {
  IngestResult result;
  Ingest(
      path, source, lang,
      [&](Document&& d) { result.documents.push_back(std::move(d)); },
      [&](RecordError&& e) { result.errors.push_back(std::move(e)); });
  return result;
}

namespace {

std::unordered_set<std::string> ParseAbbreviations(std::istream& in) {
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string entry = unicode::CollapseWhitespace(line);
    if (entry.empty() || entry[0] == '#') continue;
    out.insert(entry);
  }
  return out;
}

}  // namespace

const std::unordered_set<std::string>& DefaultAbbreviations() {
  static const std::unordered_set<std::string> kList = [] {
    std::istringstream in{std::string(kEnAbbreviations)};
    return ParseAbbreviations(in);
  }();
  return kList;
}

std::unordered_set<std::string> LoadAbbreviations(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return ParseAbbreviations(in);
}

std::vector<Sentence> SplitSentences(
    const Document& doc, const std::unordered_set<std::string>& abbreviations) {
  std::vector<Sentence> out;
  const std::string_view text = doc.text;
  const std::vector<TokenSpan> spans = TokenSpans(text);
  std::size_t first = 0;

  auto emit = [&](std::size_t last) {
    Sentence s;
    s.doc_id = doc.id;
    s.index = out.size();
    s.lang = doc.lang;
    s.source = doc.source;
    for (std::size_t k = first; k <= last; ++k) {
      s.tokens.emplace_back(
          text.substr(spans[k].begin, spans[k].end - spans[k].begin));
    }
    s.raw = std::string(
        text.substr(spans[first].begin, spans[last].end - spans[first].begin));
    out.push_back(std::move(s));
    first = last + 1;
  };

  for (std::size_t k = 0; k < spans.size(); ++k) {
    const std::string_view token =
        text.substr(spans[k].begin, spans[k].end - spans[k].begin);
    const std::u32string stripped = StripClosers(unicode::Decode(token));
    if (stripped.empty() || !IsTerminator(stripped.back(), doc.lang)) continue;
    if (doc.lang == Lang::kEn && stripped.back() == U'.' &&
        abbreviations.contains(unicode::Encode(stripped))) {
      continue;
    }
    emit(k);
  }
  if (first < spans.size()) emit(spans.size() - 1);
  return out;
}

Script ClassifyScript(std::string_view token_or_piece) {
  std::string_view s = token_or_piece;
  if (s.starts_with("##")) s.remove_prefix(2);
  std::size_t latin = 0;
  std::size_t arabic = 0;
  for (const char32_t cp : unicode::Decode(s)) {
    if (!unicode::IsAlphabetic(cp)) continue;
    if (unicode::IsArabicLetterRange(cp)) {
      ++arabic;
    } else if (unicode::IsLatinScript(cp)) {
      ++latin;
    }
  }
  if (latin > arabic) return Script::kEn;
  if (arabic > latin) return Script::kAr;
  return Script::kOther;
}

std::string ToJson(const Document& doc) {
  ordered_json j;
  j["id"] = doc.id;
  j["lang"] = LangName(doc.lang);
  j["source"] = SourceName(doc.source);
  j["text"] = doc.text;
  return j.dump();
}

std::string ToJson(const Sentence& sentence) {
  ordered_json j;
  j["doc_id"] = sentence.doc_id;
  j["index"] = sentence.index;
  j["lang"] = LangName(sentence.lang);
  j["source"] = SourceName(sentence.source);
  j["raw"] = sentence.raw;
  j["tokens"] = sentence.tokens;
  return j.dump();
}

Sentence SentenceFromJson(std::string_view line) {
  const ordered_json j = ordered_json::parse(line);
  Sentence s;
  s.doc_id = j.at("doc_id").get<std::string>();
  s.index = j.at("index").get<std::size_t>();
  s.lang = ParseLang(j.at("lang").get<std::string>());
  s.source = j.contains("source") ? ParseSource(j["source"].get<std::string>())
                                  : Source::kOther;
  s.raw = j.value("raw", std::string());
  if (j.contains("tokens")) {
    s.tokens = j["tokens"].get<std::vector<std::string>>();
  } else {
    s.tokens = unicode::SplitWhitespace(s.raw);
  }
  if (s.raw.empty()) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) s.raw.push_back(' ');
      s.raw += s.tokens[i];
    }
  }
  return s;
}

std::vector<Sentence> ReadSentences(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<Sentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    try {
      out.push_back(SentenceFromJson(line));
    } catch (const std::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  return out;
}

void WriteSentences(const std::filesystem::path& path,
                    const std::vector<Sentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& s : sentences) out << ToJson(s) << '\n';
  if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace corpus
}  // namespace enar
