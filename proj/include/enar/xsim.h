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

#ifndef ENAR_XSIM_H_
#define ENAR_XSIM_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "enar/corpus.h"

namespace enar::xsim {

inline constexpr std::uint16_t kDumpFormatVersion = 1;

struct DumpSentence {
  std::string id;
  Lang lang = Lang::kEn;
  std::uint32_t n_tokens = 0;
  std::vector<bool> special;  // one flag per token
  // n_layers x n_tokens x dim, layer-major.
  std::vector<float> values;

  friend bool operator==(const DumpSentence&, const DumpSentence&) = default;
};

class EmbeddingDump {
 public:
  EmbeddingDump() = default;
  EmbeddingDump(std::string model_name, std::uint16_t n_layers,
                std::uint32_t dim);

  const std::string& model_name() const { return model_name_; }
  std::uint16_t n_layers() const { return n_layers_; }
  std::uint32_t dim() const { return dim_; }
  std::span<const DumpSentence> sentences() const { return sentences_; }

  // Throws InputError on a duplicate id or mismatched sizes.
  void Add(DumpSentence sentence);
  const DumpSentence* Find(std::string_view id) const;

  // Token vector at a 0-based layer.
  std::span<const float> Vector(const DumpSentence& s, std::size_t layer,
                                std::size_t token) const;

  friend bool operator==(const EmbeddingDump& a, const EmbeddingDump& b) {
    return a.n_layers_ == b.n_layers_ && a.dim_ == b.dim_ &&
           a.sentences_ == b.sentences_;
  }

 private:
  std::string model_name_;
  std::uint16_t n_layers_ = 0;
  std::uint32_t dim_ = 0;
  std::vector<DumpSentence> sentences_;
  std::unordered_map<std::string, std::size_t> index_;
};

// "EMBD" u16 version, u16 n_layers, u32 dim, u32 n_sentences; then per
// sentence: u32 id byte length, id, u8 lang (0 en, 1 ar), u32 n_tokens, a
// special-token bitmap of ceil(n_tokens / 8) bytes (bit i of byte i / 8,
// least significant first), then the values as little-endian f32. The model
// name is not stored; ReadDump takes it from the file stem.
void WriteDump(const EmbeddingDump& dump, const std::filesystem::path& path);
EmbeddingDump ReadDump(const std::filesystem::path& path);

struct CheckReport {
  std::uint16_t version = 0;
  std::uint16_t n_layers = 0;
  std::uint32_t dim = 0;
  std::uint32_t n_sentences = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
  std::string ToJson() const;
};

// Structural validation without throwing: header, sizes, lang codes,
// bitmap padding, duplicate ids, non-finite values, trailing bytes.
CheckReport CheckDump(const std::filesystem::path& path);
CheckReport CheckDumpBytes(std::string_view bytes);

// Mean of the non-special token vectors at a 0-based layer. Throws
// InputError when every token is special.
std::vector<double> SentenceRepr(const EmbeddingDump& dump,
                                 const DumpSentence& s, std::size_t layer);

// Clamped to [-1, 1]. Throws InputError on a zero vector or size mismatch.
double Cosine(std::span<const double> a, std::span<const double> b);

using Alignment = std::vector<std::pair<std::string, std::string>>;

// "en_id<TAB>ar_id" per line.
Alignment ReadAlignment(const std::filesystem::path& path);

enum class RandomPairing { kCrossLingual, kWithinLanguage };

struct ProfileOptions {
  std::uint64_t seed = 0;
  RandomPairing pairing = RandomPairing::kCrossLingual;
};

// Index pairs into the sorted alignment for the random condition. Cross-
// lingual: (en of i, ar of j). Within-language: (en of i, en of j). No
// pair reproduces a bitext pair or pairs a sentence with itself.
std::vector<std::pair<std::size_t, std::size_t>> RandomPairs(
    const Alignment& sorted, const ProfileOptions& options);

struct SimilarityProfile {
  std::vector<double> bitext;  // per layer
  std::vector<double> random;
  std::size_t pair_count = 0;

  // layer,condition,mean_cosine,count with 1-based layers.
  std::string ToCsv() const;
};

// Throws InputError listing alignment ids missing from the dumps.
SimilarityProfile ProfileSerial(const EmbeddingDump& en,
                                const EmbeddingDump& ar, Alignment alignment,
                                const ProfileOptions& options);
// Layers in parallel; identical to ProfileSerial.
SimilarityProfile Profile(const EmbeddingDump& en, const EmbeddingDump& ar,
                          Alignment alignment, const ProfileOptions& options,
                          int threads);

}  // namespace enar::xsim

#endif  // ENAR_XSIM_H_
