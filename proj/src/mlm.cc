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

#include "enar/mlm.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binary_io.h"
#include "enar/errors.h"
#include "enar/random.h"

namespace enar::mlm {

int MaxPredictions(int max_len) {
  if (max_len == 128) return 20;
  if (max_len == 512) return 80;
  throw ConfigError("max length must be 128 or 512, got " +
                    std::to_string(max_len));
}

Segment SegmentSentence(const Sentence& sentence,
                        const vocab::SubwordVocab& v) {
  Segment seg;
  for (std::size_t w = 0; w < sentence.tokens.size(); ++w) {
    const vocab::Segmentation s = vocab::Segment(sentence.tokens[w], v);
    for (const int id : s.ids) {
      seg.ids.push_back(static_cast<std::uint32_t>(id));
      seg.word.push_back(static_cast<std::uint32_t>(w));
    }
  }
  return seg;
}

void PackOptions::Validate() const {
  MaxPredictions(max_len);
  if (!(next_probability >= 0.0 && next_probability <= 1.0)) {
    throw ConfigError("next-sentence probability must be in [0, 1]");
  }
}

namespace {

struct DocRange {
  std::size_t begin;
  std::size_t end;
};

std::vector<DocRange> GroupDocuments(std::span<const Sentence> sentences) {
  std::vector<DocRange> docs;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i == 0 || sentences[i].doc_id != sentences[i - 1].doc_id) {
      docs.push_back({i, i + 1});
    } else {
      docs.back().end = i + 1;
    }
  }
  return docs;
}

void Truncate(Segment& a, Segment& b, std::size_t limit) {
  while (a.size() + b.size() > limit) {
    Segment& longer = a.size() > b.size() ? a : b;
    longer.ids.pop_back();
    longer.word.pop_back();
  }
}

std::vector<PackedPair> PackDocument(std::size_t d,
                                     std::span<const Sentence> sentences,
                                     const std::vector<DocRange>& docs,
                                     const std::vector<Segment>& segs,
                                     const PackOptions& options) {
  const DocRange range = docs[d];
  const std::size_t limit = static_cast<std::size_t>(options.max_len - 3);
  const std::string& doc_id = sentences[range.begin].doc_id;
  std::vector<PackedPair> out;
  if (!options.next_sentence) {
    for (std::size_t i = range.begin; i < range.end; ++i) {
      PackedPair p;
      p.doc_id = doc_id;
      p.pair_index = i - range.begin;
      p.a = segs[i];
      Truncate(p.a, p.b, limit);
      out.push_back(std::move(p));
    }
    return out;
  }
  for (std::size_t i = range.begin; i + 1 < range.end; ++i) {
    PackedPair p;
    p.doc_id = doc_id;
    p.pair_index = i - range.begin;
    Rng rng(DeriveSeed(options.seed, "pack", doc_id, p.pair_index));
    p.is_next = rng.Bernoulli(options.next_probability) || docs.size() < 2;
    p.a = segs[i];
    if (p.is_next) {
      p.b = segs[i + 1];
    } else {
      std::size_t other = rng.UniformInt(docs.size() - 1);
      if (other >= d) ++other;
      const DocRange donor = docs[other];
      p.b = segs[donor.begin + rng.UniformInt(donor.end - donor.begin)];
    }
    Truncate(p.a, p.b, limit);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PackedPair> PackImpl(std::span<const Sentence> sentences,
                                 const vocab::SubwordVocab& v,
                                 const PackOptions& options, int threads) {
  options.Validate();
  const std::vector<DocRange> docs = GroupDocuments(sentences);
  std::vector<Segment> segs(sentences.size());
  std::vector<std::vector<PackedPair>> per_doc(docs.size());
  const auto n = static_cast<std::int64_t>(sentences.size());
  const auto n_docs = static_cast<std::int64_t>(docs.size());
#pragma omp parallel num_threads(threads)
  {
#pragma omp for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < n; ++i) {
      segs[i] = SegmentSentence(sentences[i], v);
    }
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t d = 0; d < n_docs; ++d) {
      per_doc[d] = PackDocument(d, sentences, docs, segs, options);
    }
  }
  std::vector<PackedPair> out;
  for (auto& pairs : per_doc) {
    for (auto& p : pairs) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<PackedPair> PackSerial(std::span<const Sentence> sentences,
                                   const vocab::SubwordVocab& v,
                                   const PackOptions& options) {
  options.Validate();
  const std::vector<DocRange> docs = GroupDocuments(sentences);
  std::vector<Segment> segs;
  segs.reserve(sentences.size());
  for (const auto& s : sentences) segs.push_back(SegmentSentence(s, v));
  std::vector<PackedPair> out;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (auto& p : PackDocument(d, sentences, docs, segs, options)) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<PackedPair> Pack(std::span<const Sentence> sentences,
                             const vocab::SubwordVocab& v,
                             const PackOptions& options, int threads) {
  return PackImpl(sentences, v, options, std::max(1, threads));
}

std::string_view MaskSchemeName(MaskScheme scheme) {
  return scheme == MaskScheme::kWholeWord ? "whole_word" : "subword";
}

MaskScheme ParseMaskScheme(std::string_view name) {
  if (name == "whole_word") return MaskScheme::kWholeWord;
  if (name == "subword") return MaskScheme::kSubword;
  throw ConfigError("unknown mask scheme '" + std::string(name) +
                    "' (expected whole_word or subword)");
}

void MaskingPolicy::Validate() const {
  if (!(mask_rate > 0.0 && mask_rate < 1.0)) {
    throw ConfigError("mask rate must be in (0, 1)");
  }
  const double probs[] = {mask_token_probability, random_token_probability,
                          keep_probability};
  for (const double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("action probabilities must be in [0, 1]");
    }
  }
  if (std::abs(probs[0] + probs[1] + probs[2] - 1.0) > 1e-9) {
    throw ConfigError("action probabilities must sum to 1");
  }
}

Masker::Masker(const vocab::SubwordVocab& v, MaskingPolicy policy,
               int max_len)
    : policy_(policy),
      max_len_(max_len),
      max_predictions_(MaxPredictions(max_len)) {
  policy_.Validate();
  for (std::size_t id = 0; id < v.size(); ++id) {
    if (v.IsRegular(static_cast<int>(id))) {
      regular_ids_.push_back(static_cast<std::uint32_t>(id));
    }
  }
  if (regular_ids_.empty()) throw ConfigError("vocabulary has no pieces");
}

std::size_t Masker::TargetPredictions(std::size_t pieces) const {
  const auto wanted = static_cast<std::size_t>(
      std::llround(policy_.mask_rate * static_cast<double>(pieces)));
  return std::min(static_cast<std::size_t>(max_predictions_), wanted);
}

MaskedExample Masker::Mask(const PackedPair& pair) const {
  const auto L = static_cast<std::size_t>(max_len_);
  if (pair.a.size() + pair.b.size() + 3 > L) {
    throw ConfigError("pair exceeds max length");
  }
  MaskedExample ex;
  ex.is_next = pair.is_next;
  ex.input_ids.reserve(L);
  // Positions of each maskable unit in input_ids.
  std::vector<std::vector<std::uint32_t>> units;
  auto append = [&](const Segment& seg, std::uint8_t segment_id) {
    for (std::size_t i = 0; i < seg.size(); ++i) {
      const auto pos = static_cast<std::uint32_t>(ex.input_ids.size());
      const bool new_unit = policy_.scheme == MaskScheme::kSubword || i == 0 ||
                            seg.word[i] != seg.word[i - 1];
      if (new_unit) units.emplace_back();
      units.back().push_back(pos);
      ex.input_ids.push_back(seg.ids[i]);
      ex.segment_ids.push_back(segment_id);
    }
    ex.input_ids.push_back(vocab::kSepId);
    ex.segment_ids.push_back(segment_id);
  };
  ex.input_ids.push_back(vocab::kClsId);
  ex.segment_ids.push_back(0);
  append(pair.a, 0);
  if (!pair.b.ids.empty()) append(pair.b, 1);
  ex.input_mask.assign(ex.input_ids.size(), 1);
  ex.input_ids.resize(L, vocab::kPadId);
  ex.input_mask.resize(L, 0);
  ex.segment_ids.resize(L, 0);

  const std::size_t target = TargetPredictions(pair.a.size() + pair.b.size());
  Rng rng(DeriveSeed(policy_.seed, "mask", pair.doc_id, pair.pair_index));
  rng.Shuffle(units);
  std::vector<std::uint32_t> chosen;
  for (const auto& unit : units) {
    if (chosen.size() >= target) break;
    if (chosen.size() + unit.size() > target) continue;
    chosen.insert(chosen.end(), unit.begin(), unit.end());
  }
  std::sort(chosen.begin(), chosen.end());

  const double mask_cut = policy_.mask_token_probability;
  const double random_cut = mask_cut + policy_.random_token_probability;
  for (const std::uint32_t pos : chosen) {
    const std::uint32_t original = ex.input_ids[pos];
    const double u = rng.Uniform01();
    if (u < mask_cut) {
      ex.input_ids[pos] = vocab::kMaskId;
    } else if (u < random_cut) {
      ex.input_ids[pos] = regular_ids_[rng.UniformInt(regular_ids_.size())];
    }
    ex.masked_positions.push_back(pos);
    ex.masked_label_ids.push_back(original);
  }
  return ex;
}

std::vector<MaskedExample> MaskAllSerial(std::span<const PackedPair> pairs,
                                         const Masker& masker) {
  std::vector<MaskedExample> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(masker.Mask(p));
  return out;
}

std::vector<MaskedExample> MaskAll(std::span<const PackedPair> pairs,
                                   const Masker& masker, int threads) {
  std::vector<MaskedExample> out(pairs.size());
  const auto n = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 256) num_threads(std::max(1, threads))
  for (std::int64_t i = 0; i < n; ++i) out[i] = masker.Mask(pairs[i]);
  return out;
}

using binary::PutU16;
using binary::PutU32;
using binary::Reader;

std::size_t WriteExamples(std::span<const MaskedExample> examples,
                          int max_len, const std::filesystem::path& path) {
  const int max_predictions = MaxPredictions(max_len);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  std::string header = "MLMX";
  PutU16(header, kExampleFormatVersion);
  PutU16(header, static_cast<std::uint16_t>(max_len));
  PutU16(header, static_cast<std::uint16_t>(max_predictions));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::string body;
  for (std::size_t r = 0; r < examples.size(); ++r) {
    const MaskedExample& ex = examples[r];
    const auto L = static_cast<std::size_t>(max_len);
    if (ex.input_ids.size() != L || ex.input_mask.size() != L ||
        ex.segment_ids.size() != L ||
        ex.masked_positions.size() != ex.masked_label_ids.size() ||
        ex.masked_positions.size() > static_cast<std::size_t>(max_predictions)) {
      throw InputError("record " + std::to_string(r) +
                       ": example does not fit the file layout");
    }
    body.clear();
    for (const auto id : ex.input_ids) PutU32(body, id);
    for (const auto m : ex.input_mask) body.push_back(static_cast<char>(m));
    for (const auto s : ex.segment_ids) body.push_back(static_cast<char>(s));
    PutU32(body, static_cast<std::uint32_t>(ex.masked_positions.size()));
    for (const auto p : ex.masked_positions) PutU32(body, p);
    PutU32(body, static_cast<std::uint32_t>(ex.masked_label_ids.size()));
    for (const auto l : ex.masked_label_ids) PutU32(body, l);
    body.push_back(static_cast<char>(ex.is_next ? 1 : 0));
    std::string len;
    PutU32(len, static_cast<std::uint32_t>(body.size()));
    out.write(len.data(), 4);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) {
      throw InputError("record " + std::to_string(r) + ": write failed: " +
                       path.string());
    }
  }
  out.close();
  if (!out) throw InputError("write failed: " + path.string());
  return examples.size();
}

ExampleFile ReadExamples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  Reader r(data);
  if (!r.Has(10) || data.compare(0, 4, "MLMX") != 0) {
    throw InputError(path.string() + ": not an MLMX file");
  }
  for (int i = 0; i < 4; ++i) r.U8();
  const std::uint16_t version = r.U16();
  if (version != kExampleFormatVersion) {
    throw InputError(path.string() + ": unsupported version " +
                     std::to_string(version));
  }
  ExampleFile file;
  file.max_len = r.U16();
  file.max_predictions = r.U16();
  const auto L = static_cast<std::size_t>(file.max_len);
  std::size_t index = 0;
  auto fail = [&](const std::string& what) {
    throw InputError(path.string() + ": record " + std::to_string(index) +
                     ": " + what);
  };
  while (r.remaining() > 0) {
    if (!r.Has(4)) fail("truncated length prefix");
    const std::uint32_t length = r.U32();
    if (!r.Has(length)) fail("truncated record");
    const std::size_t end = r.pos() + length;
    MaskedExample ex;
    if (length < L * 6 + 9) fail("record too short");
    for (std::size_t i = 0; i < L; ++i) ex.input_ids.push_back(r.U32());
    for (std::size_t i = 0; i < L; ++i) ex.input_mask.push_back(r.U8());
    for (std::size_t i = 0; i < L; ++i) ex.segment_ids.push_back(r.U8());
    const std::uint32_t n_pos = r.U32();
    if (n_pos > static_cast<std::uint32_t>(file.max_predictions) ||
        end - r.pos() < 4ull * n_pos + 5) {
      fail("bad masked position count");
    }
    for (std::uint32_t i = 0; i < n_pos; ++i) {
      ex.masked_positions.push_back(r.U32());
    }
    const std::uint32_t n_lab = r.U32();
    if (n_lab != n_pos || end - r.pos() != 4ull * n_lab + 1) {
      fail("bad label count");
    }
    for (std::uint32_t i = 0; i < n_lab; ++i) {
      ex.masked_label_ids.push_back(r.U32());
    }
    ex.is_next = r.U8() != 0;
    file.examples.push_back(std::move(ex));
    ++index;
  }
  return file;
}

}  // namespace enar::mlm
