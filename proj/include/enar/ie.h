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

#ifndef ENAR_IE_H_
#define ENAR_IE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace enar::ie {

// Code point offsets into the document text, half-open.
struct Span {
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Entity {
  std::string id;
  Span span;
  std::string type;
  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Trigger {
  std::string id;
  Span span;
  std::string event_type;
  friend bool operator==(const Trigger&, const Trigger&) = default;
};

struct Argument {
  std::string trigger;
  std::string entity;
  std::string role;
  friend bool operator==(const Argument&, const Argument&) = default;
};

struct Relation {
  std::string id;
  std::string arg1;
  std::string arg2;
  std::string type;
  friend bool operator==(const Relation&, const Relation&) = default;
};

struct AnnotatedDoc {
  std::string doc_id;
  std::string text;
  std::vector<Span> sentences;
  std::vector<Entity> entities;
  std::vector<Trigger> triggers;
  std::vector<Argument> arguments;
  std::vector<Relation> relations;
  friend bool operator==(const AnnotatedDoc&, const AnnotatedDoc&) = default;
};

// Throws InputError when an id is duplicated or dangling, a span falls
// outside its sentence, or an argument or relation crosses sentences.
void Validate(const AnnotatedDoc& doc);

// Index of the sentence containing `span`, or -1.
int SentenceOf(const AnnotatedDoc& doc, Span span);

std::string ToJson(const AnnotatedDoc& doc);
// Parses and validates one JSONL record.
AnnotatedDoc DocFromJson(std::string_view line);
std::vector<AnnotatedDoc> ReadDocs(const std::filesystem::path& path);
void WriteDocs(const std::filesystem::path& path,
               std::span<const AnnotatedDoc> docs);

enum class Task { kArl, kRe };
std::string_view TaskName(Task task);

inline constexpr std::string_view kNegative = "NEGATIVE";

struct Instance {
  Task task = Task::kArl;
  std::string doc_id;
  std::size_t sentence = 0;
  std::string text;  // sentence text
  // Offsets are relative to the sentence start.
  std::string id_a;
  Span span_a;
  std::string id_b;
  Span span_b;
  std::string label;
  friend bool operator==(const Instance&, const Instance&) = default;
};

std::string ToJson(const Instance& instance);

// For each trigger, one instance per entity of its sentence: the role when
// the entity is a gold argument of that trigger, NEGATIVE otherwise. Pairs
// with identical spans are skipped.
std::vector<Instance> BuildArl(const AnnotatedDoc& doc);
std::vector<Instance> BuildArlAll(std::span<const AnnotatedDoc> docs,
                                  int threads);

struct ReOptions {
  double negative_ratio = 1.0;
  std::uint64_t seed = 0;
  void Validate() const;
};

// Gold relations in their annotated direction, then per sentence a seeded
// sample of unordered same-sentence entity pairs that are not gold in
// either direction. The sample size is
// min(available, round(negative_ratio * gold)) using `fallback_rate` in
// place of gold for sentences without relations.
std::vector<Instance> BuildRe(const AnnotatedDoc& doc,
                              const ReOptions& options, double fallback_rate);

// Mean gold relations per sentence holding at least two entities.
double MeanRelationsPerSentence(std::span<const AnnotatedDoc> docs);

// Uses MeanRelationsPerSentence over `docs` as the fallback rate.
std::vector<Instance> BuildReAll(std::span<const AnnotatedDoc> docs,
                                 const ReOptions& options, int threads);

struct DocSplit {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
};

// Sorts ids, shuffles them with `seed` and cuts at floor(f0 * n) and
// floor((f0 + f1) * n). Throws ConfigError unless the fractions sum to 1 and
// there are at least 3 distinct ids.
DocSplit SplitDocs(std::vector<std::string> doc_ids,
                   std::array<double, 3> fractions, std::uint64_t seed);

}  // namespace enar::ie

#endif  // ENAR_IE_H_
