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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>

#include "enar/errors.h"
#include "enar/random.h"
#include "enar/unicode.h"

namespace enar::ie {

using nlohmann::ordered_json;

namespace {

bool Contains(Span outer, Span inner) {
  return outer.start <= inner.start && inner.end <= outer.end;
}

template <typename T>
std::map<std::string, const T*, std::less<>> IndexById(
    const std::vector<T>& items, std::string_view what,
    const std::string& doc_id) {
  std::map<std::string, const T*, std::less<>> index;
  for (const T& item : items) {
    if (item.id.empty()) {
      throw InputError(doc_id + ": " + std::string(what) + " with empty id");
    }
    if (!index.emplace(item.id, &item).second) {
      throw InputError(doc_id + ": duplicate " + std::string(what) + " id '" +
                       item.id + "'");
    }
  }
  return index;
}

}  // namespace

int SentenceOf(const AnnotatedDoc& doc, Span span) {
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    if (Contains(doc.sentences[i], span)) return static_cast<int>(i);
  }
  return -1;
}

void Validate(const AnnotatedDoc& doc) {
  const std::string& id = doc.doc_id;
  if (id.empty()) throw InputError("document with empty doc_id");
  const auto length = static_cast<std::uint32_t>(unicode::CountChars(doc.text));
  std::uint32_t previous_end = 0;
  for (const Span s : doc.sentences) {
    if (s.start >= s.end || s.end > length || s.start < previous_end) {
      throw InputError(id + ": sentence spans must be non-empty, ordered, "
                            "disjoint and inside the text");
    }
    previous_end = s.end;
  }
  auto check_span = [&](Span s, const std::string& what) {
    if (s.start >= s.end || s.end > length) {
      throw InputError(id + ": " + what + " has an empty or out-of-range span");
    }
    if (SentenceOf(doc, s) < 0) {
      throw InputError(id + ": " + what + " is not inside a sentence");
    }
  };
  for (const auto& e : doc.entities) check_span(e.span, "entity " + e.id);
  for (const auto& t : doc.triggers) check_span(t.span, "trigger " + t.id);
  const auto entities = IndexById(doc.entities, "entity", id);
  const auto triggers = IndexById(doc.triggers, "trigger", id);
  IndexById(doc.relations, "relation", id);

  std::set<std::pair<std::string, std::string>> seen_args;
  for (const auto& a : doc.arguments) {
    const auto t = triggers.find(a.trigger);
    const auto e = entities.find(a.entity);
    if (t == triggers.end() || e == entities.end()) {
      throw InputError(id + ": argument " + a.trigger + "->" + a.entity +
                       " references an unknown id");
    }
    if (SentenceOf(doc, t->second->span) != SentenceOf(doc, e->second->span)) {
      throw InputError(id + ": argument " + a.trigger + "->" + a.entity +
                       " crosses sentences");
    }
    if (!seen_args.emplace(a.trigger, a.entity).second) {
      throw InputError(id + ": duplicate argument " + a.trigger + "->" +
                       a.entity);
    }
  }
  for (const auto& r : doc.relations) {
    const auto a = entities.find(r.arg1);
    const auto b = entities.find(r.arg2);
    if (a == entities.end() || b == entities.end()) {
      throw InputError(id + ": relation " + r.id + " references an unknown id");
    }
    if (r.arg1 == r.arg2) {
      throw InputError(id + ": relation " + r.id + " pairs an entity with "
                                                   "itself");
    }
    if (SentenceOf(doc, a->second->span) != SentenceOf(doc, b->second->span)) {
      throw InputError(id + ": relation " + r.id + " crosses sentences");
    }
  }
}

namespace {

ordered_json SpanJson(Span s) { return ordered_json::array({s.start, s.end}); }

Span SpanFrom(const nlohmann::json& j) {
  if (j.is_array() && j.size() == 2) {
    return {j[0].get<std::uint32_t>(), j[1].get<std::uint32_t>()};
  }
  return {j.at("start").get<std::uint32_t>(), j.at("end").get<std::uint32_t>()};
}

}  // namespace

std::string ToJson(const AnnotatedDoc& doc) {
  ordered_json j;
  j["doc_id"] = doc.doc_id;
  j["text"] = doc.text;
  j["sentences"] = ordered_json::array();
  for (const Span s : doc.sentences) j["sentences"].push_back(SpanJson(s));
  j["entities"] = ordered_json::array();
  for (const auto& e : doc.entities) {
    j["entities"].push_back(ordered_json{{"id", e.id},
                                         {"start", e.span.start},
                                         {"end", e.span.end},
                                         {"type", e.type}});
  }
  j["triggers"] = ordered_json::array();
  for (const auto& t : doc.triggers) {
    j["triggers"].push_back(ordered_json{{"id", t.id},
                                         {"start", t.span.start},
                                         {"end", t.span.end},
                                         {"event_type", t.event_type}});
  }
  j["arguments"] = ordered_json::array();
  for (const auto& a : doc.arguments) {
    j["arguments"].push_back(ordered_json{
        {"trigger", a.trigger}, {"entity", a.entity}, {"role", a.role}});
  }
  j["relations"] = ordered_json::array();
  for (const auto& r : doc.relations) {
    j["relations"].push_back(ordered_json{{"id", r.id},
                                          {"arg1", r.arg1},
                                          {"arg2", r.arg2},
                                          {"type", r.type}});
  }
  return j.dump();
}

AnnotatedDoc DocFromJson(std::string_view line) {
  AnnotatedDoc doc;
  try {
    const nlohmann::json j = nlohmann::json::parse(line);
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.text = j.at("text").get<std::string>();
    for (const auto& s : j.at("sentences")) doc.sentences.push_back(SpanFrom(s));
    const auto list = [&](const char* key) {
      return j.contains(key) ? j.at(key) : nlohmann::json::array();
    };
    for (const auto& e : list("entities")) {
      doc.entities.push_back({e.at("id").get<std::string>(), SpanFrom(e),
                              e.value("type", std::string())});
    }
    for (const auto& t : list("triggers")) {
      doc.triggers.push_back({t.at("id").get<std::string>(), SpanFrom(t),
                              t.value("event_type", std::string())});
    }
    for (const auto& a : list("arguments")) {
      doc.arguments.push_back({a.at("trigger").get<std::string>(),
                               a.at("entity").get<std::string>(),
                               a.at("role").get<std::string>()});
    }
    for (const auto& r : list("relations")) {
      doc.relations.push_back(
          {r.at("id").get<std::string>(), r.at("arg1").get<std::string>(),
           r.at("arg2").get<std::string>(), r.at("type").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad annotated document: ") + e.what());
  }
  if (unicode::FindInvalidUtf8(doc.text)) {
    throw InputError(doc.doc_id + ": text is not valid UTF-8");
  }
  Validate(doc);
  return doc;
}

std::vector<AnnotatedDoc> ReadDocs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<AnnotatedDoc> docs;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (unicode::CollapseWhitespace(line).empty()) continue;
    try {
      docs.push_back(DocFromJson(line));
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (!ids.insert(docs.back().doc_id).second) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": duplicate doc_id " + docs.back().doc_id);
    }
  }
  return docs;
}

void WriteDocs(const std::filesystem::path& path,
               std::span<const AnnotatedDoc> docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& d : docs) out << ToJson(d) << '\n';
  if (!out) throw InputError("write failed: " + path.string());
}

std::string_view TaskName(Task task) {
  return task == Task::kArl ? "arl" : "re";
}

std::string ToJson(const Instance& instance) {
  ordered_json j;
  j["task"] = TaskName(instance.task);
  j["doc_id"] = instance.doc_id;
  j["sentence"] = instance.sentence;
  j["text"] = instance.text;
  j["a"] = ordered_json{{"id", instance.id_a},
                        {"start", instance.span_a.start},
                        {"end", instance.span_a.end}};
  j["b"] = ordered_json{{"id", instance.id_b},
                        {"start", instance.span_b.start},
                        {"end", instance.span_b.end}};
  j["label"] = instance.label;
  return j.dump();
}

namespace {

// Per-sentence view shared by both builders.
struct SentenceView {
  std::string text;
  Span bounds;
  std::vector<const Entity*> entities;
};

std::vector<SentenceView> Sentences(const AnnotatedDoc& doc) {
  const std::u32string cps = unicode::Decode(doc.text);
  std::vector<SentenceView> views(doc.sentences.size());
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const Span s = doc.sentences[i];
    views[i].bounds = s;
    views[i].text =
        unicode::Encode(std::u32string_view(cps).substr(s.start, s.end - s.start));
  }
  for (const auto& e : doc.entities) {
    const int s = SentenceOf(doc, e.span);
    if (s >= 0) views[s].entities.push_back(&e);
  }
  return views;
}

Span Relative(Span s, Span bounds) {
  return {s.start - bounds.start, s.end - bounds.start};
}

Instance MakeInstance(Task task, const AnnotatedDoc& doc, std::size_t sentence,
                      const SentenceView& view, const std::string& id_a,
                      Span a, const std::string& id_b, Span b,
                      std::string label) {
  return {task,          doc.doc_id, sentence,
          view.text,     id_a,       Relative(a, view.bounds),
          id_b,          Relative(b, view.bounds),
          std::move(label)};
}

template <typename Fn>
std::vector<Instance> ParallelConcat(std::size_t n, int threads, Fn fn) {
  std::vector<std::vector<Instance>> parts(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(std::max(1, threads))
  for (std::int64_t i = 0; i < count; ++i) parts[i] = fn(i);
  std::vector<Instance> out;
  for (auto& p : parts) {
    for (auto& inst : p) out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

std::vector<Instance> BuildArl(const AnnotatedDoc& doc) {
  const std::vector<SentenceView> views = Sentences(doc);
  std::map<std::pair<std::string, std::string>, std::string> roles;
  for (const auto& a : doc.arguments) roles[{a.trigger, a.entity}] = a.role;
  std::vector<Instance> out;
  for (const auto& t : doc.triggers) {
    const int s = SentenceOf(doc, t.span);
    if (s < 0) continue;
    for (const Entity* e : views[s].entities) {
      if (e->span == t.span) continue;
      const auto it = roles.find({t.id, e->id});
      out.push_back(MakeInstance(
          Task::kArl, doc, s, views[s], t.id, t.span, e->id, e->span,
          it == roles.end() ? std::string(kNegative) : it->second));
    }
  }
  return out;
}

std::vector<Instance> BuildArlAll(std::span<const AnnotatedDoc> docs,
                                  int threads) {
  return ParallelConcat(docs.size(), threads,
                        [&](std::size_t i) { return BuildArl(docs[i]); });
}

void ReOptions::Validate() const {
  if (!(negative_ratio >= 0.0) || !std::isfinite(negative_ratio)) {
    throw ConfigError("negative ratio must be a non-negative number");
  }
}

std::vector<Instance> BuildRe(const AnnotatedDoc& doc,
                              const ReOptions& options, double fallback_rate) {
  options.Validate();
  const std::vector<SentenceView> views = Sentences(doc);
  std::map<std::string, const Entity*, std::less<>> entities;
  for (const auto& e : doc.entities) entities[e.id] = &e;
  std::set<std::pair<std::string, std::string>> gold_pairs;
  std::vector<std::vector<const Relation*>> gold(views.size());
  for (const auto& r : doc.relations) {
    gold_pairs.emplace(r.arg1, r.arg2);
    gold_pairs.emplace(r.arg2, r.arg1);
    const Entity* a = entities.at(r.arg1);
    if (a->span == entities.at(r.arg2)->span) continue;
    const int s = SentenceOf(doc, a->span);
    if (s >= 0) gold[s].push_back(&r);
  }

  std::vector<Instance> out;
  for (std::size_t s = 0; s < views.size(); ++s) {
    const SentenceView& view = views[s];
    for (const Relation* r : gold[s]) {
      const Entity* a = entities.at(r->arg1);
      const Entity* b = entities.at(r->arg2);
      out.push_back(MakeInstance(Task::kRe, doc, s, view, a->id, a->span,
                                 b->id, b->span, r->type));
    }
    std::vector<std::pair<const Entity*, const Entity*>> candidates;
    for (std::size_t i = 0; i < view.entities.size(); ++i) {
      for (std::size_t j = i + 1; j < view.entities.size(); ++j) {
        const Entity* a = view.entities[i];
        const Entity* b = view.entities[j];
        if (a->span == b->span) continue;
        if (gold_pairs.count({a->id, b->id})) continue;
        candidates.emplace_back(a, b);
      }
    }
    const double basis =
        gold[s].empty() ? fallback_rate : static_cast<double>(gold[s].size());
    const auto wanted = static_cast<std::size_t>(
        std::llround(options.negative_ratio * basis));
    const std::size_t quota = std::min(candidates.size(), wanted);
    if (quota == 0) continue;

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(DeriveSeed(options.seed, "re", doc.doc_id, s));
    for (std::size_t k = 0; k < quota; ++k) {
      const std::size_t pick = k + rng.UniformInt(order.size() - k);
      std::swap(order[k], order[pick]);
    }
    order.resize(quota);
    std::sort(order.begin(), order.end());
    for (const std::size_t k : order) {
      const auto [a, b] = candidates[k];
      out.push_back(MakeInstance(Task::kRe, doc, s, view, a->id, a->span,
                                 b->id, b->span, std::string(kNegative)));
    }
  }
  return out;
}

double MeanRelationsPerSentence(std::span<const AnnotatedDoc> docs) {
  std::uint64_t relations = 0;
  std::uint64_t sentences = 0;
  for (const auto& doc : docs) {
    for (const auto& view : Sentences(doc)) {
      if (view.entities.size() >= 2) ++sentences;
    }
    relations += doc.relations.size();
  }
  return sentences == 0 ? 0.0
                        : static_cast<double>(relations) /
                              static_cast<double>(sentences);
}

std::vector<Instance> BuildReAll(std::span<const AnnotatedDoc> docs,
                                 const ReOptions& options, int threads) {
  options.Validate();
  const double fallback = MeanRelationsPerSentence(docs);
  return ParallelConcat(docs.size(), threads, [&](std::size_t i) {
    return BuildRe(docs[i], options, fallback);
  });
}

DocSplit SplitDocs(std::vector<std::string> doc_ids,
                   std::array<double, 3> fractions, std::uint64_t seed) {
  for (const double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw ConfigError("split fractions must be in [0, 1]");
    }
  }
  if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
  std::sort(doc_ids.begin(), doc_ids.end());
  if (std::adjacent_find(doc_ids.begin(), doc_ids.end()) != doc_ids.end()) {
    throw InputError("duplicate document id in split input");
  }
  if (doc_ids.size() < 3) {
    throw ConfigError("need at least 3 documents to split");
  }
  Rng rng(DeriveSeed(seed, "split", "", 0));
  rng.Shuffle(doc_ids);
  const double n = static_cast<double>(doc_ids.size());
  const auto cut1 = static_cast<std::size_t>(std::floor(fractions[0] * n + 1e-9));
  const auto cut2 = std::min(
      doc_ids.size(),
      static_cast<std::size_t>(std::floor((fractions[0] + fractions[1]) * n + 1e-9)));
  DocSplit split;
  split.train.assign(doc_ids.begin(), doc_ids.begin() + cut1);
  split.dev.assign(doc_ids.begin() + cut1, doc_ids.begin() + cut2);
  split.test.assign(doc_ids.begin() + cut2, doc_ids.end());
  return split;
}

}  // namespace enar::ie
