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

#ifndef ENAR_VOCAB_H_
#define ENAR_VOCAB_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "enar/corpus.h"

namespace enar::vocab {

enum class Scheme { kWordPiece, kUnigram };

std::string_view SchemeName(Scheme scheme);
Scheme ParseScheme(std::string_view name);

inline constexpr std::array<std::string_view, 5> kSpecials = {
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kClsId = 2;
inline constexpr int kSepId = 3;
inline constexpr int kMaskId = 4;
inline constexpr int kNumSpecials = 5;

inline constexpr std::size_t kMaxWordChars = 100;
inline constexpr std::string_view kContinuation = "##";

// "unused-<k>" with k >= 1.
bool IsPlaceholderPiece(std::string_view piece);

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

// Ordered piece list; a piece's id is its index. Ids 0..4 are the specials.
// Placeholder pieces ("unused-k") pad a vocabulary to a fixed size and are
// never produced by segmentation.
class SubwordVocab {
 public:
  SubwordVocab(Scheme scheme, bool cased);

  // Appends a piece and returns its id. Throws ConfigError on duplicates.
  int Add(std::string piece, double logprob = 0.0);
  // Appends "unused-1", "unused-2", ... until size() == target.
  void PadWithPlaceholders(std::size_t target);

  std::optional<int> Find(std::string_view piece) const;
  // Like Find, but only for ids segmentation may emit.
  std::optional<int> FindRegular(std::string_view piece) const;

  const std::string& Piece(int id) const { return pieces_[id]; }
  double LogProb(int id) const { return logprob_[id]; }
  std::size_t size() const { return pieces_.size(); }
  std::span<const std::string> pieces() const { return pieces_; }
  Scheme scheme() const { return scheme_; }
  bool cased() const { return cased_; }

  bool IsSpecial(int id) const { return id >= 0 && id < kNumSpecials; }
  bool IsPlaceholder(int id) const { return placeholder_[id]; }
  bool IsRegular(int id) const { return !IsSpecial(id) && !IsPlaceholder(id); }
  std::size_t PlaceholderCount() const;
  // Longest regular piece in code points, excluding any "##" marker.
  std::size_t MaxPieceChars() const { return max_piece_chars_; }

  // NFC for cased vocabularies, FoldUncased otherwise.
  std::string Normalize(std::string_view word) const;

  // Writes `path` (one piece per line, LF) and `MetaPath(path)`.
  void Save(const std::filesystem::path& path) const;
  static SubwordVocab Load(const std::filesystem::path& path);
  static std::filesystem::path MetaPath(const std::filesystem::path& path);

 private:
  Scheme scheme_;
  bool cased_;
  std::vector<std::string> pieces_;
  std::vector<double> logprob_;
  std::vector<bool> placeholder_;
  std::unordered_map<std::string, int, StringHash, std::equal_to<>> index_;
  std::size_t max_piece_chars_ = 0;
};

struct Segmentation {
  std::string word;  // normalized
  std::vector<std::string> pieces;
  std::vector<int> ids;
  bool is_unk = false;
};

// Wordpiece: greedy longest-match-first with "##" continuations; the whole
// word becomes [UNK] if any position cannot be matched. Unigram: Viterbi
// path maximizing the summed log-probability. Words longer than
// kMaxWordChars are [UNK].
Segmentation Segment(std::string_view word, const SubwordVocab& v);

// Word frequencies over sentence tokens after vocabulary normalization,
// sorted by word.
using WordCounts = std::vector<std::pair<std::string, std::uint64_t>>;
WordCounts CountWordsSerial(std::span<const Sentence> corpus, bool cased);
WordCounts CountWords(std::span<const Sentence> corpus, bool cased,
                      int threads);

struct WordPieceOptions {
  std::size_t size = 50000;
  bool cased = false;
  std::uint64_t min_pair_frequency = 2;
  int threads = 1;
};

// Iterative pair merging scored by freq(ab) / (freq(a) * freq(b)); ties go
// to the lexicographically smallest merged piece. Throws ConfigError when
// `size` cannot hold the specials plus the alphabet.
SubwordVocab TrainWordPiece(std::span<const Sentence> corpus,
                            const WordPieceOptions& options);
SubwordVocab TrainWordPiece(const WordCounts& counts,
                            const WordPieceOptions& options);

struct UnigramOptions {
  std::size_t size = 32000;
  bool cased = true;
  int em_iterations = 4;
  double prune_fraction = 0.2;
  std::size_t max_piece_chars = 16;
  std::uint64_t min_frequency = 2;
  // Seed candidates kept, as a multiple of `size`.
  std::size_t seed_factor = 4;
  int threads = 1;
};

SubwordVocab TrainUnigram(std::span<const Sentence> corpus,
                          const UnigramOptions& options);
SubwordVocab TrainUnigram(const WordCounts& counts,
                          const UnigramOptions& options);

// Union of the two piece sets (first vocabulary's order, then the second's
// new pieces), padded with placeholders to exactly `target`. Specials count
// as shared pieces.
SubwordVocab MergeVocabs(const SubwordVocab& a, const SubwordVocab& b,
                         std::size_t target);

struct Composition {
  std::size_t en = 0;
  std::size_t ar = 0;
  std::size_t other = 0;
};
// Script counts over regular pieces.
Composition VocabComposition(const SubwordVocab& v);

}  // namespace enar::vocab

#endif  // ENAR_VOCAB_H_
