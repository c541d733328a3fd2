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

#include "enar/vocab.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "enar/errors.h"
#include "enar/unicode.h"

namespace enar::vocab {

std::string_view SchemeName(Scheme scheme) {
  return scheme == Scheme::kWordPiece ? "wordpiece" : "unigram";
}

Scheme ParseScheme(std::string_view name) {
  if (name == "wordpiece") return Scheme::kWordPiece;
  if (name == "unigram") return Scheme::kUnigram;
  throw ConfigError("unknown vocabulary scheme '" + std::string(name) + "'");
}

bool IsPlaceholderPiece(std::string_view piece) {
  constexpr std::string_view kPrefix = "unused-";
  if (!piece.starts_with(kPrefix) || piece.size() == kPrefix.size()) {
    return false;
  }
  const std::string_view digits = piece.substr(kPrefix.size());
  return digits[0] != '0' &&
         std::all_of(digits.begin(), digits.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

SubwordVocab::SubwordVocab(Scheme scheme, bool cased)
    : scheme_(scheme), cased_(cased) {
  for (const auto special : kSpecials) Add(std::string(special));
}

int SubwordVocab::Add(std::string piece, double logprob) {
  if (piece.empty()) throw ConfigError("empty vocabulary piece");
  if (index_.contains(piece)) {
    throw ConfigError("duplicate vocabulary piece '" + piece + "'");
  }
  const int id = static_cast<int>(pieces_.size());
  if (id >= kNumSpecials) {
    std::string_view body = piece;
    if (scheme_ == Scheme::kWordPiece && body.size() > kContinuation.size() &&
        body.starts_with(kContinuation)) {
      body.remove_prefix(kContinuation.size());
    }
    max_piece_chars_ = std::max(max_piece_chars_, unicode::CountChars(body));
  }
  index_.emplace(piece, id);
  pieces_.push_back(std::move(piece));
  logprob_.push_back(logprob);
  placeholder_.push_back(false);
  return id;
}

void SubwordVocab::PadWithPlaceholders(std::size_t target) {
  for (std::size_t k = 1; pieces_.size() < target; ++k) {
    std::string name = "unused-" + std::to_string(k);
    if (index_.contains(name)) continue;
    const int id = static_cast<int>(pieces_.size());
    index_.emplace(name, id);
    pieces_.push_back(std::move(name));
    logprob_.push_back(0.0);
    placeholder_.push_back(true);
  }
}

std::optional<int> SubwordVocab::Find(std::string_view piece) const {
  const auto it = index_.find(piece);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> SubwordVocab::FindRegular(std::string_view piece) const {
  const auto id = Find(piece);
  if (!id || !IsRegular(*id)) return std::nullopt;
  return id;
}

std::size_t SubwordVocab::PlaceholderCount() const {
  return static_cast<std::size_t>(
      std::count(placeholder_.begin(), placeholder_.end(), true));
}

std::string SubwordVocab::Normalize(std::string_view word) const {
  return cased_ ? unicode::Nfc(word) : unicode::FoldUncased(word);
}

std::filesystem::path SubwordVocab::MetaPath(
    const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.json");
}

void SubwordVocab::Save(const std::filesystem::path& path) const {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    for (const auto& p : pieces_) out << p << '\n';
    if (!out) throw InputError("write failed: " + path.string());
  }
  nlohmann::ordered_json meta;
  meta["scheme"] = SchemeName(scheme_);
  meta["cased"] = cased_;
  meta["specials"] = nlohmann::ordered_json::array();
  for (const auto s : kSpecials) meta["specials"].push_back(s);
  meta["size"] = pieces_.size();
  meta["placeholders"] = PlaceholderCount();
  if (scheme_ == Scheme::kUnigram) {
    auto& lp = meta["piece_logprob"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (IsRegular(static_cast<int>(i))) {
        lp.push_back(logprob_[i]);
      } else {
        lp.push_back(nullptr);
      }
    }
  }
  std::ofstream out(MetaPath(path), std::ios::binary);
  if (!out) throw InputError("cannot write " + MetaPath(path).string());
  out << meta.dump(1) << '\n';
}

SubwordVocab SubwordVocab::Load(const std::filesystem::path& path) {
  std::ifstream meta_in(MetaPath(path), std::ios::binary);
  if (!meta_in) {
    throw InputError("missing vocabulary metadata " + MetaPath(path).string());
  }
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bad vocabulary metadata: " + std::string(e.what()));
  }
  SubwordVocab v(ParseScheme(meta.at("scheme").get<std::string>()),
                 meta.at("cased").get<bool>());
  const auto size = meta.at("size").get<std::size_t>();
  const auto placeholders = meta.value("placeholders", std::size_t{0});

  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() != size) {
    throw InputError(path.string() + ": expected " + std::to_string(size) +
                     " pieces, found " + std::to_string(lines.size()));
  }
  for (int i = 0; i < kNumSpecials; ++i) {
    if (lines.size() <= static_cast<std::size_t>(i) ||
        lines[i] != kSpecials[i]) {
      throw InputError(path.string() + ": special piece " +
                       std::string(kSpecials[i]) + " not at id " +
                       std::to_string(i));
    }
  }
  if (placeholders > size - kNumSpecials) {
    throw InputError(path.string() + ": placeholder count exceeds size");
  }
  const std::size_t first_placeholder = size - placeholders;
  const nlohmann::json* lp = nullptr;
  if (v.scheme() == Scheme::kUnigram) {
    lp = &meta.at("piece_logprob");
    if (lp->size() != size) {
      throw InputError(path.string() + ": piece_logprob length mismatch");
    }
  }
  for (std::size_t i = kNumSpecials; i < first_placeholder; ++i) {
    const double logprob = lp ? (*lp)[i].get<double>() : 0.0;
    try {
      v.Add(lines[i], logprob);
    } catch (const ConfigError& e) {
      throw InputError(path.string() + ":" + std::to_string(i + 1) + ": " +
                       e.what());
    }
  }
  v.PadWithPlaceholders(size);
  for (std::size_t i = first_placeholder; i < size; ++i) {
    if (v.Piece(static_cast<int>(i)) != lines[i]) {
      throw InputError(path.string() + ":" + std::to_string(i + 1) +
                       ": unexpected placeholder '" + lines[i] + "'");
    }
  }
  return v;
}

namespace {

// Byte offsets of code point boundaries; size() == chars + 1.
std::vector<std::size_t> CharBounds(std::string_view s) {
  std::vector<std::size_t> bounds;
  bounds.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) bounds.push_back(i);
  }
  bounds.push_back(s.size());
  return bounds;
}

std::string_view Slice(std::string_view s, const std::vector<std::size_t>& b,
                       std::size_t from, std::size_t to) {
  return s.substr(b[from], b[to] - b[from]);
}

// Best-scoring segmentation of `word` given a piece scorer returning the
// piece's log-probability, or nullopt when the span is not a piece.
// Fills `path` with (begin, end) char indices. Returns -inf when no full
// segmentation exists.
template <typename Scorer>
double Viterbi(std::string_view word, const std::vector<std::size_t>& bounds,
               std::size_t max_len, const Scorer& score,
               std::vector<std::pair<std::size_t, std::size_t>>* path) {
  const std::size_t n = bounds.size() - 1;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> best(n + 1, kNegInf);
  std::vector<std::size_t> back(n + 1, 0);
  best[0] = 0.0;
  for (std::size_t end = 1; end <= n; ++end) {
    const std::size_t longest = std::min(max_len, end);
    for (std::size_t len = 1; len <= longest; ++len) {
      const std::size_t begin = end - len;
      if (best[begin] == kNegInf) continue;
      const std::optional<double> lp = score(Slice(word, bounds, begin, end));
      if (!lp) continue;
      const double cand = best[begin] + *lp;
      if (cand > best[end]) {
        best[end] = cand;
        back[end] = begin;
      }
    }
  }
  if (path != nullptr) {
    path->clear();
    if (best[n] != kNegInf) {
      for (std::size_t end = n; end > 0; end = back[end]) {
        path->emplace_back(back[end], end);
      }
      std::reverse(path->begin(), path->end());
    }
  }
  return best[n];
}

Segmentation Unk(std::string word) {
  Segmentation seg;
  seg.word = std::move(word);
  seg.pieces = {std::string(kSpecials[kUnkId])};
  seg.ids = {kUnkId};
  seg.is_unk = true;
  return seg;
}

Segmentation SegmentWordPiece(std::string word, const SubwordVocab& v) {
  const std::vector<std::size_t> bounds = CharBounds(word);
  const std::size_t n = bounds.size() - 1;
  const std::size_t max_len = std::max<std::size_t>(1, v.MaxPieceChars());
  Segmentation seg;
  std::size_t start = 0;
  std::string candidate;
  while (start < n) {
    std::optional<int> found;
    std::size_t end = std::min(n, start + max_len);
    for (; end > start; --end) {
      candidate.clear();
      if (start > 0) candidate.append(kContinuation);
      candidate.append(Slice(word, bounds, start, end));
      found = v.FindRegular(candidate);
      if (found) break;
    }
    if (!found) return Unk(std::move(word));
    seg.pieces.push_back(v.Piece(*found));
    seg.ids.push_back(*found);
    start = end;
  }
  seg.word = std::move(word);
  return seg;
}

Segmentation SegmentUnigram(std::string word, const SubwordVocab& v) {
  const std::vector<std::size_t> bounds = CharBounds(word);
  std::vector<std::pair<std::size_t, std::size_t>> path;
  const double score = Viterbi(
      word, bounds, std::max<std::size_t>(1, v.MaxPieceChars()),
      [&](std::string_view piece) -> std::optional<double> {
        const auto id = v.FindRegular(piece);
        if (!id) return std::nullopt;
        return v.LogProb(*id);
      },
      &path);
  if (!std::isfinite(score)) return Unk(std::move(word));
  Segmentation seg;
  for (const auto& [b, e] : path) {
    const int id = *v.FindRegular(Slice(word, bounds, b, e));
    seg.pieces.push_back(v.Piece(id));
    seg.ids.push_back(id);
  }
  seg.word = std::move(word);
  return seg;
}

}  // namespace

Segmentation Segment(std::string_view word, const SubwordVocab& v) {
  std::string normalized = v.Normalize(word);
  if (normalized.empty()) return Unk(std::move(normalized));
  if (unicode::CountChars(normalized) > kMaxWordChars) {
    return Unk(std::move(normalized));
  }
  return v.scheme() == Scheme::kWordPiece
             ? SegmentWordPiece(std::move(normalized), v)
             : SegmentUnigram(std::move(normalized), v);
}

// ---------------------------------------------------------------------------
// Word counting

namespace {

using CountMap = std::unordered_map<std::string, std::uint64_t, StringHash,
                                    std::equal_to<>>;

std::string NormalizeWord(std::string_view token, bool cased) {
  return cased ? unicode::Nfc(token) : unicode::FoldUncased(token);
}

WordCounts Sorted(const CountMap& m) {
  WordCounts out(m.begin(), m.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

WordCounts CountWordsSerial(std::span<const Sentence> corpus, bool cased) {
  CountMap counts;
  for (const Sentence& s : corpus) {
    for (const auto& tok : s.tokens) {
      std::string w = NormalizeWord(tok, cased);
      if (!w.empty()) ++counts[std::move(w)];
    }
  }
  return Sorted(counts);
}

WordCounts CountWords(std::span<const Sentence> corpus, bool cased,
                      int threads) {
  const int nt = std::max(1, threads);
  std::vector<CountMap> partial(nt);
  const auto n = static_cast<std::int64_t>(corpus.size());
#pragma omp parallel num_threads(nt)
  {
    CountMap& local = partial[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      for (const auto& tok : corpus[i].tokens) {
        std::string w = NormalizeWord(tok, cased);
        if (!w.empty()) ++local[std::move(w)];
      }
    }
  }
  CountMap merged = std::move(partial[0]);
  for (int t = 1; t < nt; ++t) {
    for (auto& [w, c] : partial[t]) merged[w] += c;
  }
  return Sorted(merged);
}

// ---------------------------------------------------------------------------
// WordPiece training

namespace {

class WordPieceTrainer {
 public:
  WordPieceTrainer(const WordCounts& counts, const WordPieceOptions& options)
      : options_(options) {
    std::set<std::string> alphabet;
    std::vector<std::vector<std::string>> split;
    split.reserve(counts.size());
    for (const auto& [word, count] : counts) {
      std::vector<std::string> chars = unicode::SplitChars(word);
      for (std::size_t i = 1; i < chars.size(); ++i) {
        chars[i].insert(0, kContinuation);
      }
      alphabet.insert(chars.begin(), chars.end());
      split.push_back(std::move(chars));
      word_count_.push_back(count);
    }
    for (const auto& piece : alphabet) Intern(piece);
    alphabet_size_ = alphabet.size();
    for (auto& chars : split) {
      std::vector<int> seq;
      seq.reserve(chars.size());
      for (const auto& c : chars) seq.push_back(symbol_index_.at(c));
      words_.push_back(std::move(seq));
    }
    piece_freq_.assign(symbols_.size(), 0);
    for (std::uint32_t w = 0; w < words_.size(); ++w) AddWord(w);
  }

  std::size_t alphabet_size() const { return alphabet_size_; }

  SubwordVocab Run() {
    SubwordVocab v(Scheme::kWordPiece, options_.cased);
    for (std::size_t i = 0; i < alphabet_size_; ++i) v.Add(symbols_[i]);
    while (v.size() < options_.size) {
      const auto best = BestPair();
      if (!best) break;
      const int merged = Merge(*best);
      if (!v.Find(symbols_[merged])) v.Add(symbols_[merged]);
    }
    v.PadWithPlaceholders(options_.size);
    return v;
  }

 private:
  using Key = std::uint64_t;
  static Key MakeKey(int a, int b) {
    return (static_cast<Key>(a) << 32) | static_cast<std::uint32_t>(b);
  }
  static int First(Key k) { return static_cast<int>(k >> 32); }
  static int Second(Key k) { return static_cast<int>(k & 0xffffffffu); }

  int Intern(const std::string& piece) {
    const auto it = symbol_index_.find(piece);
    if (it != symbol_index_.end()) return it->second;
    const int id = static_cast<int>(symbols_.size());
    symbols_.push_back(piece);
    symbol_index_.emplace(piece, id);
    piece_freq_.push_back(0);
    return id;
  }

  std::string MergedString(int a, int b) const {
    std::string_view rhs = symbols_[b];
    if (rhs.starts_with(kContinuation)) rhs.remove_prefix(kContinuation.size());
    return symbols_[a] + std::string(rhs);
  }

  void AddWord(std::uint32_t w) {
    const auto& seq = words_[w];
    const std::uint64_t c = word_count_[w];
    for (std::size_t i = 0; i < seq.size(); ++i) {
      piece_freq_[seq[i]] += c;
      if (i + 1 < seq.size()) {
        const Key k = MakeKey(seq[i], seq[i + 1]);
        pair_freq_[k] += c;
        auto& where = where_[k];
        if (where.empty() || where.back() != w) where.push_back(w);
      }
    }
  }

  void RemoveWord(std::uint32_t w) {
    const auto& seq = words_[w];
    const std::uint64_t c = word_count_[w];
    for (std::size_t i = 0; i < seq.size(); ++i) {
      piece_freq_[seq[i]] -= c;
      if (i + 1 < seq.size()) {
        const auto it = pair_freq_.find(MakeKey(seq[i], seq[i + 1]));
        it->second -= c;
        if (it->second == 0) pair_freq_.erase(it);
      }
    }
  }

  // True when pair `x` scores strictly better than pair `y`.
  bool Better(Key x, std::uint64_t fx, Key y, std::uint64_t fy) const {
    using u128 = unsigned __int128;
    const u128 lhs = static_cast<u128>(fx) * piece_freq_[First(y)] *
                     piece_freq_[Second(y)];
    const u128 rhs = static_cast<u128>(fy) * piece_freq_[First(x)] *
                     piece_freq_[Second(x)];
    if (lhs != rhs) return lhs > rhs;
    const std::string mx = MergedString(First(x), Second(x));
    const std::string my = MergedString(First(y), Second(y));
    if (mx != my) return mx < my;
    if (symbols_[First(x)] != symbols_[First(y)]) {
      return symbols_[First(x)] < symbols_[First(y)];
    }
    return symbols_[Second(x)] < symbols_[Second(y)];
  }

  std::optional<Key> BestPair() const {
    std::optional<Key> best;
    std::uint64_t best_freq = 0;
    for (const auto& [k, f] : pair_freq_) {
      if (f < options_.min_pair_frequency) continue;
      if (!best || Better(k, f, *best, best_freq)) {
        best = k;
        best_freq = f;
      }
    }
    return best;
  }

  int Merge(Key k) {
    const int a = First(k);
    const int b = Second(k);
    const int merged = Intern(MergedString(a, b));
    std::vector<std::uint32_t> affected = std::move(where_[k]);
    where_.erase(k);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()),
                   affected.end());
    for (const std::uint32_t w : affected) {
      auto& seq = words_[w];
      bool present = false;
      for (std::size_t i = 0; i + 1 < seq.size() && !present; ++i) {
        present = seq[i] == a && seq[i + 1] == b;
      }
      if (!present) continue;
      RemoveWord(w);
      std::vector<int> next;
      next.reserve(seq.size());
      for (std::size_t i = 0; i < seq.size();) {
        if (i + 1 < seq.size() && seq[i] == a && seq[i + 1] == b) {
          next.push_back(merged);
          i += 2;
        } else {
          next.push_back(seq[i]);
          ++i;
        }
      }
      seq = std::move(next);
      AddWord(w);
    }
    return merged;
  }

  WordPieceOptions options_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> symbol_index_;
  std::vector<std::uint64_t> piece_freq_;
  std::vector<std::vector<int>> words_;
  std::vector<std::uint64_t> word_count_;
  std::unordered_map<Key, std::uint64_t> pair_freq_;
  std::unordered_map<Key, std::vector<std::uint32_t>> where_;
  std::size_t alphabet_size_ = 0;
};

}  // namespace

SubwordVocab TrainWordPiece(const WordCounts& counts,
                            const WordPieceOptions& options) {
  if (counts.empty()) throw ConfigError("cannot train on an empty corpus");
  WordPieceTrainer trainer(counts, options);
  const std::size_t minimum = trainer.alphabet_size() + kNumSpecials;
  if (options.size < minimum) {
    throw ConfigError("vocabulary size " + std::to_string(options.size) +
                      " is below alphabet + specials = " +
                      std::to_string(minimum));
  }
  return trainer.Run();
}

SubwordVocab TrainWordPiece(std::span<const Sentence> corpus,
                            const WordPieceOptions& options) {
  return TrainWordPiece(CountWords(corpus, options.cased, options.threads),
                        options);
}

// ---------------------------------------------------------------------------
// Unigram training

namespace {

struct TrainingWord {
  std::string text;
  std::vector<std::size_t> bounds;
  std::uint64_t count;
};

class UnigramModel {
 public:
  void Reset(std::vector<std::string> pieces, std::vector<double> logprob,
             std::vector<bool> is_char) {
    pieces_ = std::move(pieces);
    logprob_ = std::move(logprob);
    is_char_ = std::move(is_char);
    index_.clear();
    max_len_ = 1;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      index_.emplace(pieces_[i], static_cast<int>(i));
      max_len_ = std::max(max_len_, unicode::CountChars(pieces_[i]));
    }
  }

  std::size_t size() const { return pieces_.size(); }
  const std::string& piece(std::size_t i) const { return pieces_[i]; }
  double logprob(std::size_t i) const { return logprob_[i]; }
  bool is_char(std::size_t i) const { return is_char_[i]; }
  std::vector<double>& mutable_logprob() { return logprob_; }

  // Viterbi over the model; `excluded` is a piece id left out of the search.
  double Best(std::string_view text, const std::vector<std::size_t>& bounds,
              int excluded, std::vector<int>* ids) const {
    std::vector<std::pair<std::size_t, std::size_t>> path;
    const double score = Viterbi(
        text, bounds, max_len_,
        [&](std::string_view p) -> std::optional<double> {
          const auto it = index_.find(p);
          if (it == index_.end() || it->second == excluded) return std::nullopt;
          return logprob_[it->second];
        },
        ids ? &path : nullptr);
    if (ids != nullptr) {
      ids->clear();
      for (const auto& [b, e] : path) {
        ids->push_back(index_.find(Slice(text, bounds, b, e))->second);
      }
    }
    return score;
  }

 private:
  std::vector<std::string> pieces_;
  std::vector<double> logprob_;
  std::vector<bool> is_char_;
  std::unordered_map<std::string, int, StringHash, std::equal_to<>> index_;
  std::size_t max_len_ = 1;
};

std::vector<std::uint64_t> ViterbiCounts(const UnigramModel& model,
                                         const std::vector<TrainingWord>& words,
                                         int threads) {
  const int nt = std::max(1, threads);
  std::vector<std::vector<std::uint64_t>> partial(
      nt, std::vector<std::uint64_t>(model.size(), 0));
  const auto n = static_cast<std::int64_t>(words.size());
#pragma omp parallel num_threads(nt)
  {
    auto& local = partial[omp_get_thread_num()];
    std::vector<int> ids;
#pragma omp for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& w = words[i];
      model.Best(w.text, w.bounds, -1, &ids);
      for (const int id : ids) local[id] += w.count;
    }
  }
  std::vector<std::uint64_t> counts(model.size(), 0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += p[i];
  }
  return counts;
}

// Re-estimates log-probabilities from Viterbi counts; unused pieces get
// half a count so that every piece keeps a finite score.
void Reestimate(UnigramModel& model, const std::vector<std::uint64_t>& counts) {
  double total = 0.0;
  for (const auto c : counts) total += c > 0 ? static_cast<double>(c) : 0.5;
  auto& lp = model.mutable_logprob();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double c = counts[i] > 0 ? static_cast<double>(counts[i]) : 0.5;
    lp[i] = std::log(c / total);
  }
}

}  // namespace

SubwordVocab TrainUnigram(const WordCounts& counts,
                          const UnigramOptions& options) {
  if (counts.empty()) throw ConfigError("cannot train on an empty corpus");
  if (options.em_iterations < 1) {
    throw ConfigError("EM iteration count must be >= 1");
  }
  if (!(options.prune_fraction > 0.0 && options.prune_fraction < 1.0)) {
    throw ConfigError("prune fraction must be in (0, 1)");
  }

  std::vector<TrainingWord> words;
  words.reserve(counts.size());
  std::map<std::string, std::uint64_t> char_freq;
  CountMap substr_freq;
  for (const auto& [word, count] : counts) {
    TrainingWord w{word, CharBounds(word), count};
    const std::size_t n = w.bounds.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
      char_freq[std::string(Slice(w.text, w.bounds, i, i + 1))] += count;
      const std::size_t longest = std::min(options.max_piece_chars, n - i);
      for (std::size_t len = 2; len <= longest; ++len) {
        const std::string_view sub = Slice(w.text, w.bounds, i, i + len);
        const auto it = substr_freq.find(sub);
        if (it == substr_freq.end()) {
          substr_freq.emplace(std::string(sub), count);
        } else {
          it->second += count;
        }
      }
    }
    words.push_back(std::move(w));
  }

  const std::size_t minimum = char_freq.size() + kNumSpecials;
  if (options.size < minimum) {
    throw ConfigError("vocabulary size " + std::to_string(options.size) +
                      " is below alphabet + specials = " +
                      std::to_string(minimum));
  }
  const std::size_t target = options.size - kNumSpecials;

  struct Candidate {
    std::string piece;
    std::uint64_t freq;
    std::size_t chars;
  };
  std::vector<Candidate> candidates;
  for (auto& [piece, freq] : substr_freq) {
    if (freq < options.min_frequency) continue;
    candidates.push_back({piece, freq, unicode::CountChars(piece)});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              const auto sx = x.freq * x.chars;
              const auto sy = y.freq * y.chars;
              if (sx != sy) return sx > sy;
              return x.piece < y.piece;
            });
  const std::size_t seed_size = options.seed_factor * options.size;
  if (candidates.size() > seed_size) candidates.resize(seed_size);

  std::vector<std::string> pieces;
  std::vector<double> logprob;
  std::vector<bool> is_char;
  double total = 0.0;
  for (const auto& [c, f] : char_freq) total += static_cast<double>(f);
  for (const auto& c : candidates) total += static_cast<double>(c.freq);
  for (const auto& [c, f] : char_freq) {
    pieces.push_back(c);
    logprob.push_back(std::log(static_cast<double>(f) / total));
    is_char.push_back(true);
  }
  for (const auto& c : candidates) {
    pieces.push_back(c.piece);
    logprob.push_back(std::log(static_cast<double>(c.freq) / total));
    is_char.push_back(false);
  }

  UnigramModel model;
  model.Reset(std::move(pieces), std::move(logprob), std::move(is_char));

  std::vector<std::uint64_t> viterbi_counts;
  while (true) {
    for (int it = 0; it < options.em_iterations; ++it) {
      viterbi_counts = ViterbiCounts(model, words, options.threads);
      Reestimate(model, viterbi_counts);
    }
    if (model.size() <= target) break;

    // Loss of removing a piece: its Viterbi count times the log-probability
    // drop when its surface is re-segmented without it.
    const auto n = static_cast<std::int64_t>(model.size());
    std::vector<double> loss(model.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 64) \
    num_threads(std::max(1, options.threads))
    for (std::int64_t i = 0; i < n; ++i) {
      if (model.is_char(i) || viterbi_counts[i] == 0) continue;
      const std::string& p = model.piece(i);
      const double alt =
          model.Best(p, CharBounds(p), static_cast<int>(i), nullptr);
      loss[i] = static_cast<double>(viterbi_counts[i]) *
                (model.logprob(i) - alt);
    }
    std::vector<std::size_t> removable;
    for (std::size_t i = 0; i < model.size(); ++i) {
      if (!model.is_char(i)) removable.push_back(i);
    }
    std::sort(removable.begin(), removable.end(),
              [&](std::size_t x, std::size_t y) {
                if (loss[x] != loss[y]) return loss[x] < loss[y];
                return model.piece(x) < model.piece(y);
              });
    const auto shrunk = static_cast<std::size_t>(std::floor(
        static_cast<double>(model.size()) * (1.0 - options.prune_fraction)));
    std::size_t drop = model.size() - std::max(target, shrunk);
    drop = std::max<std::size_t>(drop, 1);
    drop = std::min(drop, removable.size());
    if (drop == 0) break;
    std::vector<bool> removed(model.size(), false);
    for (std::size_t k = 0; k < drop; ++k) removed[removable[k]] = true;

    std::vector<std::string> kept_pieces;
    std::vector<double> kept_lp;
    std::vector<bool> kept_char;
    for (std::size_t i = 0; i < model.size(); ++i) {
      if (removed[i]) continue;
      kept_pieces.push_back(model.piece(i));
      kept_lp.push_back(model.logprob(i));
      kept_char.push_back(model.is_char(i));
    }
    model.Reset(std::move(kept_pieces), std::move(kept_lp),
                std::move(kept_char));
  }

  std::vector<std::size_t> order(model.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (model.logprob(x) != model.logprob(y)) {
      return model.logprob(x) > model.logprob(y);
    }
    return model.piece(x) < model.piece(y);
  });
  SubwordVocab v(Scheme::kUnigram, options.cased);
  for (const std::size_t i : order) v.Add(model.piece(i), model.logprob(i));
  v.PadWithPlaceholders(options.size);
  return v;
}

SubwordVocab TrainUnigram(std::span<const Sentence> corpus,
                          const UnigramOptions& options) {
  return TrainUnigram(CountWords(corpus, options.cased, options.threads),
                      options);
}

// ---------------------------------------------------------------------------

SubwordVocab MergeVocabs(const SubwordVocab& a, const SubwordVocab& b,
                         std::size_t target) {
  if (a.scheme() != b.scheme()) {
    throw ConfigError("cannot merge a " + std::string(SchemeName(a.scheme())) +
                      " vocabulary with a " +
                      std::string(SchemeName(b.scheme())) + " vocabulary");
  }
  if (a.cased() != b.cased()) {
    throw ConfigError("cannot merge cased and uncased vocabularies");
  }
  SubwordVocab merged(a.scheme(), a.cased());
  for (const SubwordVocab* v : {&a, &b}) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      const int id = static_cast<int>(i);
      if (!v->IsRegular(id) || merged.Find(v->Piece(id))) continue;
      merged.Add(v->Piece(id), v->LogProb(id));
    }
  }
  if (target < merged.size()) {
    throw ConfigError("merge target " + std::to_string(target) +
                      " is below the union size " +
                      std::to_string(merged.size()));
  }
  merged.PadWithPlaceholders(target);
  return merged;
}

Composition VocabComposition(const SubwordVocab& v) {
  Composition c;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v.IsRegular(static_cast<int>(i))) continue;
    switch (corpus::ClassifyScript(v.Piece(static_cast<int>(i)))) {
      case Script::kEn:
        ++c.en;
        break;
      case Script::kAr:
        ++c.ar;
        break;
      case Script::kOther:
        ++c.other;
        break;
    }
  }
  return c;
}

}  // namespace enar::vocab
