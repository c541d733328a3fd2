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

#ifndef ENAR_CORPUS_H_
#define ENAR_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace enar {

enum class Lang { kEn, kAr };
enum class Source { kGigaword, kWiki, kOscar, kOther };
enum class Script { kEn, kAr, kOther };

std::string_view LangName(Lang lang);
std::string_view SourceName(Source source);
std::string_view ScriptName(Script script);
// Throw ConfigError on unknown names.
Lang ParseLang(std::string_view name);
Source ParseSource(std::string_view name);

struct Document {
  std::string id;
  Lang lang = Lang::kEn;
  Source source = Source::kOther;
  std::string text;
};

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  Lang lang = Lang::kEn;
  Source source = Source::kOther;
  std::vector<std::string> tokens;
  std::string raw;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct RecordError {
  std::string file;
  std::size_t record = 0;       // 0-based record ordinal within the file
  std::size_t byte_offset = 0;  // absolute offset of the offending bytes
  std::string message;
};

namespace corpus {

using DocumentSink = std::function<void(Document&&)>;
using ErrorSink = std::function<void(RecordError&&)>;

// Streams documents out of one file. Files ending in ".jsonl" are read as
// one JSON object per line ({id?, text, lang?, source?}); anything else is
// plain UTF-8 with blank-line separated documents. Text is NFC-normalized.
// Derived ids have the form "<source>:<lang>:<file name>:<record ordinal>".
void IngestFile(const std::filesystem::path& path, Source source, Lang lang,
                const DocumentSink& on_doc, const ErrorSink& on_error);

// Every regular file under `path` (or `path` itself), in sorted path order.
void Ingest(const std::filesystem::path& path, Source source, Lang lang,
            const DocumentSink& on_doc, const ErrorSink& on_error);

struct IngestResult {
  std::vector<Document> documents;
  std::vector<RecordError> errors;
};
IngestResult Ingest(const std::filesystem::path& path, Source source,
                    Lang lang);

// The English abbreviation guard list shipped in data/en_abbreviations.txt.
const std::unordered_set<std::string>& DefaultAbbreviations();
std::unordered_set<std::string> LoadAbbreviations(
    const std::filesystem::path& path);

// Splits at sentence terminators that are followed by whitespace or end of
// text; the terminator stays with the preceding sentence. English splits on
// . ! ? unless the token ending the candidate sentence is a guarded
// abbreviation. Arabic additionally splits on U+061F and U+06D4.
std::vector<Sentence> SplitSentences(
    const Document& doc,
    const std::unordered_set<std::string>& abbreviations =
        DefaultAbbreviations());

Script ClassifyScript(std::string_view token_or_piece);

// JSONL record I/O.
std::string ToJson(const Document& doc);
std::string ToJson(const Sentence& sentence);
Sentence SentenceFromJson(std::string_view line);

// Reads a sentence JSONL file; throws InputError with the line number on a
// malformed record.
std::vector<Sentence> ReadSentences(const std::filesystem::path& path);
void WriteSentences(const std::filesystem::path& path,
                    const std::vector<Sentence>& sentences);

}  // namespace corpus
}  // namespace enar

#endif  // ENAR_CORPUS_H_
