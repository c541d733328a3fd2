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

#ifndef ENAR_MLM_H_
#define ENAR_MLM_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "enar/corpus.h"
#include "enar/vocab.h"

namespace enar::mlm {

// Masked predictions allowed per sequence: 20 for 128, 80 for 512.
// Other lengths throw ConfigError.
int MaxPredictions(int max_len);

// A run of pieces with the source word each piece came from.
struct Segment {
  std::vector<std::uint32_t> ids;
  std::vector<std::uint32_t> word;  // word ordinal per piece

  std::size_t size() const { return ids.size(); }
  friend bool operator==(const Segment&, const Segment&) = default;
};

Segment SegmentSentence(const Sentence& sentence,
                        const vocab::SubwordVocab& v);

struct PackOptions {
  int max_len = 128;
  bool next_sentence = true;
  double next_probability = 0.5;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct PackedPair {
  std::string doc_id;
  std::size_t pair_index = 0;
  Segment a;
  Segment b;  // empty when next_sentence is off
  bool is_next = false;

  friend bool operator==(const PackedPair&, const PackedPair&) = default;
};

// Documents are runs of consecutive sentences sharing a doc id. With NSP,
// every sentence that has a successor in its document opens one pair; b is
// that successor with probability next_probability and otherwise a random
// sentence of another document. Without NSP each sentence is one segment.
// Pairs are truncated to max_len - 3 pieces by trimming the end of the
// longer segment (b on ties).
std::vector<PackedPair> PackSerial(std::span<const Sentence> sentences,
                                   const vocab::SubwordVocab& v,
                                   const PackOptions& options);
std::vector<PackedPair> Pack(std::span<const Sentence> sentences,
                             const vocab::SubwordVocab& v,
                             const PackOptions& options, int threads);

enum class MaskScheme { kWholeWord, kSubword };
std::string_view MaskSchemeName(MaskScheme scheme);
MaskScheme ParseMaskScheme(std::string_view name);

struct MaskingPolicy {
  MaskScheme scheme = MaskScheme::kWholeWord;
  double mask_rate = 0.15;
  double mask_token_probability = 0.8;
  double random_token_probability = 0.1;
  double keep_probability = 0.1;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct MaskedExample {
  std::vector<std::uint32_t> input_ids;
  std::vector<std::uint8_t> input_mask;
  std::vector<std::uint8_t> segment_ids;
  std::vector<std::uint32_t> masked_positions;
  std::vector<std::uint32_t> masked_label_ids;
  bool is_next = false;

  friend bool operator==(const MaskedExample&, const MaskedExample&) = default;
};

class Masker {
 public:
  Masker(const vocab::SubwordVocab& v, MaskingPolicy policy, int max_len);

  int max_len() const { return max_len_; }
  int max_predictions() const { return max_predictions_; }
  const MaskingPolicy& policy() const { return policy_; }

  // min(P, round(mask_rate * pieces)).
  std::size_t TargetPredictions(std::size_t pieces) const;

  // Lays out [CLS] a [SEP] (b [SEP]) padded to max_len and masks it with a
  // generator seeded by (seed, doc id, pair index).
  MaskedExample Mask(const PackedPair& pair) const;

 private:
  MaskingPolicy policy_;
  int max_len_;
  int max_predictions_;
  std::vector<std::uint32_t> regular_ids_;
};

std::vector<MaskedExample> MaskAllSerial(std::span<const PackedPair> pairs,
                                         const Masker& masker);
std::vector<MaskedExample> MaskAll(std::span<const PackedPair> pairs,
                                   const Masker& masker, int threads);

// "MLMX" u16 version, u16 L, u16 P, then one record per example: u32 byte
// length followed by input_ids (u32 x L), input_mask (u8 x L), segment_ids
// (u8 x L), u32 n + masked_positions (u32 x n), u32 n + masked_label_ids
// (u32 x n), is_next (u8). Little-endian.
inline constexpr std::uint16_t kExampleFormatVersion = 1;

std::size_t WriteExamples(std::span<const MaskedExample> examples,
                          int max_len, const std::filesystem::path& path);

struct ExampleFile {
  int max_len = 0;
  int max_predictions = 0;
  std::vector<MaskedExample> examples;
};

// Throws InputError naming the failing record index.
ExampleFile ReadExamples(const std::filesystem::path& path);

}  // namespace enar::mlm

#endif  // ENAR_MLM_H_
