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

#ifndef ENAR_TESTS_ORACLES_H_
#define ENAR_TESTS_ORACLES_H_

// Slow reference implementations used only by tests. Each one follows the
// textbook definition directly and shares no code with the library beyond
// the vocabulary container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "enar/ie.h"
#include "enar/unicode.h"
#include "enar/vocab.h"

namespace enar::oracle {

inline bool HasRegularPiece(const vocab::SubwordVocab& v,
                            const std::string& piece) {
  for (std::size_t id = 0; id < v.size(); ++id) {
    if (v.IsRegular(static_cast<int>(id)) && v.Piece(static_cast<int>(id)) == piece) {
      return true;
    }
  }
  return false;
}

// Greedy longest-match-first over code points. nullopt means [UNK].
inline std::optional<std::vector<std::string>> GreedyWordPiece(
    const std::string& word, const vocab::SubwordVocab& v) {
  const std::vector<std::string> chars = unicode::SplitChars(word);
  if (chars.empty() || chars.size() > vocab::kMaxWordChars) return std::nullopt;
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < chars.size()) {
    bool found = false;
    for (std::size_t j = chars.size(); j > i && !found; --j) {
      std::string cand = i == 0 ? "" : "##";
      for (std::size_t k = i; k < j; ++k) cand += chars[k];
      if (HasRegularPiece(v, cand)) {
        out.push_back(cand);
        i = j;
        found = true;
      }
    }
    if (!found) return std::nullopt;
  }
  return out;
}

struct ViterbiResult {
  double score = -std::numeric_limits<double>::infinity();
  // Every segmentation reaching the best score.
  std::vector<std::vector<std::string>> best;
};

// Enumerates all 2^(n-1) segmentations. Empty `best` means unreachable.
inline ViterbiResult ExhaustiveViterbi(const std::string& word,
                                       const vocab::SubwordVocab& v) {
  std::map<std::string, double> logprob;
  for (std::size_t id = 0; id < v.size(); ++id) {
    if (v.IsRegular(static_cast<int>(id))) {
      logprob[v.Piece(static_cast<int>(id))] = v.LogProb(static_cast<int>(id));
    }
  }
  const std::vector<std::string> chars = unicode::SplitChars(word);
  ViterbiResult r;
  if (chars.empty()) return r;
  const std::size_t cuts = chars.size() - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cuts); ++mask) {
    std::vector<std::string> pieces(1);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      pieces.back() += chars[i];
      if (i < cuts && (mask >> i) & 1) pieces.emplace_back();
    }
    double score = 0.0;
    bool ok = true;
    for (const auto& p : pieces) {
      const auto it = logprob.find(p);
      if (it == logprob.end()) {
        ok = false;
        break;
      }
      score += it->second;
    }
    if (!ok) continue;
    if (score > r.score + 1e-12) {
      r.score = score;
      r.best = {pieces};
    } else if (std::abs(score - r.score) <= 1e-12) {
      r.best.push_back(pieces);
    }
  }
  return r;
}

// WordPiece training recomputing every count from scratch each round.
inline std::vector<std::string> ReferenceWordPieceMerges(
    const std::vector<std::pair<std::string, std::uint64_t>>& counts,
    std::size_t max_merges, std::uint64_t min_pair_frequency) {
  std::vector<std::vector<std::string>> words;
  std::vector<std::uint64_t> freq;
  for (const auto& [w, c] : counts) {
    std::vector<std::string> chars = unicode::SplitChars(w);
    for (std::size_t i = 1; i < chars.size(); ++i) chars[i] = "##" + chars[i];
    words.push_back(chars);
    freq.push_back(c);
  }
  auto merged_string = [](const std::string& a, const std::string& b) {
    return a + (b.rfind("##", 0) == 0 ? b.substr(2) : b);
  };
  std::vector<std::string> merges;
  while (merges.size() < max_merges) {
    std::map<std::string, std::uint64_t> piece;
    std::map<std::pair<std::string, std::string>, std::uint64_t> pair;
    for (std::size_t w = 0; w < words.size(); ++w) {
      for (std::size_t i = 0; i < words[w].size(); ++i) {
        piece[words[w][i]] += freq[w];
        if (i + 1 < words[w].size()) {
          pair[{words[w][i], words[w][i + 1]}] += freq[w];
        }
      }
    }
    std::optional<std::pair<std::string, std::string>> best;
    for (const auto& [p, f] : pair) {
      if (f < min_pair_frequency) continue;
      // Scores are compared as exact rationals.
      const unsigned __int128 num = f;
      const unsigned __int128 den =
          static_cast<unsigned __int128>(piece[p.first]) * piece[p.second];
      bool take = !best;
      if (best) {
        const unsigned __int128 bnum = pair[*best];
        const unsigned __int128 bden =
            static_cast<unsigned __int128>(piece[best->first]) *
            piece[best->second];
        if (num * bden != bnum * den) {
          take = num * bden > bnum * den;
        } else {
          take = std::make_tuple(merged_string(p.first, p.second), p.first,
                                 p.second) <
                 std::make_tuple(merged_string(best->first, best->second),
                                 best->first, best->second);
        }
      }
      if (take) best = p;
    }
    if (!best) break;
    const std::string m = merged_string(best->first, best->second);
    for (auto& seq : words) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i < seq.size();) {
        if (i + 1 < seq.size() && seq[i] == best->first &&
            seq[i + 1] == best->second) {
          next.push_back(m);
          i += 2;
        } else {
          next.push_back(seq[i++]);
        }
      }
      seq = next;
    }
    merges.push_back(m);
  }
  return merges;
}

// Instances as comparable tuples: (doc, sentence, a, b, label).
using InstanceKey = std::tuple<std::string, std::size_t, std::string,
                               std::string, std::string>;

inline InstanceKey Key(const ie::Instance& i) {
  return {i.doc_id, i.sentence, i.id_a, i.id_b, i.label};
}

inline int ContainingSentence(const ie::AnnotatedDoc& d, ie::Span s) {
  int found = -1;
  for (std::size_t i = 0; i < d.sentences.size(); ++i) {
    if (d.sentences[i].start <= s.start && s.end <= d.sentences[i].end) {
      found = static_cast<int>(i);
    }
  }
  return found;
}

inline std::multiset<InstanceKey> EnumerateArl(const ie::AnnotatedDoc& d) {
  std::multiset<InstanceKey> out;
  for (const auto& t : d.triggers) {
    for (const auto& e : d.entities) {
      const int st = ContainingSentence(d, t.span);
      if (st < 0 || st != ContainingSentence(d, e.span)) continue;
      if (t.span == e.span) continue;
      std::string label(ie::kNegative);
      for (const auto& a : d.arguments) {
        if (a.trigger == t.id && a.entity == e.id) label = a.role;
      }
      out.insert({d.doc_id, static_cast<std::size_t>(st), t.id, e.id, label});
    }
  }
  return out;
}

struct ReEnumeration {
  std::multiset<InstanceKey> positives;
  // Unordered candidate negatives per sentence.
  std::map<std::size_t, std::set<InstanceKey>> negatives;
};

inline ReEnumeration EnumerateRe(const ie::AnnotatedDoc& d) {
  ReEnumeration r;
  std::map<std::string, const ie::Entity*> ent;
  for (const auto& e : d.entities) ent[e.id] = &e;
  for (const auto& rel : d.relations) {
    const ie::Entity* a = ent.at(rel.arg1);
    const ie::Entity* b = ent.at(rel.arg2);
    if (a->span == b->span) continue;
    r.positives.insert({d.doc_id,
                        static_cast<std::size_t>(ContainingSentence(d, a->span)),
                        rel.arg1, rel.arg2, rel.type});
  }
  for (std::size_t i = 0; i < d.entities.size(); ++i) {
    for (std::size_t j = i + 1; j < d.entities.size(); ++j) {
      const auto& a = d.entities[i];
      const auto& b = d.entities[j];
      const int s = ContainingSentence(d, a.span);
      if (s < 0 || s != ContainingSentence(d, b.span)) continue;
      if (a.span == b.span) continue;
      bool gold = false;
      for (const auto& rel : d.relations) {
        gold = gold || (rel.arg1 == a.id && rel.arg2 == b.id) ||
               (rel.arg1 == b.id && rel.arg2 == a.id);
      }
      if (gold) continue;
      r.negatives[s].insert({d.doc_id, static_cast<std::size_t>(s), a.id, b.id,
                             std::string(ie::kNegative)});
    }
  }
  return r;
}

// A random valid annotated document.
inline ie::AnnotatedDoc RandomDoc(std::mt19937_64& rng, const std::string& id) {
  auto pick = [&](std::uint64_t n) { return static_cast<std::size_t>(rng() % n); };
  ie::AnnotatedDoc d;
  d.doc_id = id;
  const std::size_t n_sent = 1 + pick(4);
  std::uint32_t pos = 0;
  for (std::size_t s = 0; s < n_sent; ++s) {
    const std::uint32_t len = 20 + static_cast<std::uint32_t>(pick(30));
    d.sentences.push_back({pos, pos + len});
    pos += len + 1;
  }
  d.text.assign(pos, 'x');
  for (std::size_t s = 0; s < n_sent; ++s) d.text[d.sentences[s].end] = ' ';
  static const char* kTypes[] = {"PER", "ORG", "GPE", "LOC"};
  static const char* kRoles[] = {"Agent", "Victim", "Place", "Time"};
  static const char* kRels[] = {"PART-WHOLE", "ORG-AFF", "PHYS"};
  std::size_t next_e = 0;
  std::size_t next_t = 0;
  std::size_t next_r = 0;
  for (std::size_t s = 0; s < n_sent; ++s) {
    const ie::Span bounds = d.sentences[s];
    auto random_span = [&]() {
      const std::uint32_t len = bounds.end - bounds.start;
      const std::uint32_t a = bounds.start + static_cast<std::uint32_t>(pick(len - 1));
      const std::uint32_t b =
          a + 1 + static_cast<std::uint32_t>(pick(std::min<std::uint32_t>(4, bounds.end - a)));
      return ie::Span{a, std::min(b, bounds.end)};
    };
    std::vector<std::string> ents;
    const std::size_t n_ent = pick(6);
    for (std::size_t k = 0; k < n_ent; ++k) {
      ie::Entity e{"E" + std::to_string(next_e++), random_span(), kTypes[pick(4)]};
      if (k > 0 && pick(8) == 0) e.span = d.entities.back().span;
      ents.push_back(e.id);
      d.entities.push_back(e);
    }
    const std::size_t n_trig = pick(3);
    for (std::size_t k = 0; k < n_trig; ++k) {
      ie::Trigger t{"T" + std::to_string(next_t++), random_span(), "Attack"};
      d.triggers.push_back(t);
      for (const auto& e : ents) {
        if (pick(3) == 0) d.arguments.push_back({t.id, e, kRoles[pick(4)]});
      }
    }
    std::set<std::pair<std::string, std::string>> used;
    for (std::size_t i = 0; i < ents.size(); ++i) {
      for (std::size_t j = 0; j < ents.size(); ++j) {
        if (i == j || pick(5) != 0) continue;
        if (used.count({ents[j], ents[i]})) continue;
        used.insert({ents[i], ents[j]});
        d.relations.push_back({"R" + std::to_string(next_r++), ents[i],
                               ents[j], kRels[pick(3)]});
      }
    }
  }
  return d;
}

}  // namespace enar::oracle

#endif  // ENAR_TESTS_ORACLES_H_
