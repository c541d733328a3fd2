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

#include "enar/xsim.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "binary_io.h"
#include "enar/errors.h"
#include "enar/random.h"
#include "enar/unicode.h"

namespace enar::xsim {

EmbeddingDump::EmbeddingDump(std::string model_name, std::uint16_t n_layers,
                             std::uint32_t dim)
    : model_name_(std::move(model_name)), n_layers_(n_layers), dim_(dim) {
  if (n_layers == 0 || dim == 0) {
    throw InputError("dump needs at least one layer and one dimension");
  }
}

void EmbeddingDump::Add(DumpSentence sentence) {
  const std::size_t expected =
      static_cast<std::size_t>(n_layers_) * sentence.n_tokens * dim_;
  if (sentence.special.size() != sentence.n_tokens ||
      sentence.values.size() != expected) {
    throw InputError("sentence " + sentence.id +
                     ": vector sizes do not match the dump shape");
  }
  if (!index_.emplace(sentence.id, sentences_.size()).second) {
    throw InputError("duplicate sentence id " + sentence.id);
  }
  sentences_.push_back(std::move(sentence));
}

const DumpSentence* EmbeddingDump::Find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &sentences_[it->second];
}

std::span<const float> EmbeddingDump::Vector(const DumpSentence& s,
                                             std::size_t layer,
                                             std::size_t token) const {
  const std::size_t offset = (layer * s.n_tokens + token) * dim_;
  return std::span<const float>(s.values).subspan(offset, dim_);
}

void WriteDump(const EmbeddingDump& dump, const std::filesystem::path& path) {
  std::string out = "EMBD";
  binary::PutU16(out, kDumpFormatVersion);
  binary::PutU16(out, dump.n_layers());
  binary::PutU32(out, dump.dim());
  binary::PutU32(out, static_cast<std::uint32_t>(dump.sentences().size()));
  for (const DumpSentence& s : dump.sentences()) {
    binary::PutU32(out, static_cast<std::uint32_t>(s.id.size()));
    out += s.id;
    binary::PutU8(out, s.lang == Lang::kEn ? 0 : 1);
    binary::PutU32(out, s.n_tokens);
    std::string bitmap((s.n_tokens + 7) / 8, '\0');
    for (std::uint32_t i = 0; i < s.n_tokens; ++i) {
      if (s.special[i]) bitmap[i / 8] |= static_cast<char>(1 << (i % 8));
    }
    out += bitmap;
    for (const float v : s.values) binary::PutF32(out, v);
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw InputError("write failed: " + path.string());
}

namespace {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// Fills `report`; stops at the first problem that makes the rest of the
// stream unreadable. When `dump` is non-null, parsed sentences go there.
void Parse(std::string_view bytes, CheckReport& report,
           std::vector<DumpSentence>* sentences) {
  binary::Reader r(bytes);
  if (!r.Has(16) || bytes.substr(0, 4) != "EMBD") {
    report.problems.push_back("missing EMBD header");
    return;
  }
  r.Bytes(4);
  report.version = r.U16();
  report.n_layers = r.U16();
  report.dim = r.U32();
  report.n_sentences = r.U32();
  if (report.version != kDumpFormatVersion) {
    report.problems.push_back("unsupported version " +
                              std::to_string(report.version));
    return;
  }
  if (report.n_layers == 0 || report.dim == 0) {
    report.problems.push_back("n_layers and dim must be positive");
    return;
  }
  std::set<std::string, std::less<>> ids;
  for (std::uint32_t k = 0; k < report.n_sentences; ++k) {
    const std::string where = "sentence " + std::to_string(k);
    if (!r.Has(4)) {
      report.problems.push_back(where + ": truncated");
      return;
    }
    const std::uint32_t id_len = r.U32();
    if (!r.Has(static_cast<std::size_t>(id_len) + 5)) {
      report.problems.push_back(where + ": truncated id");
      return;
    }
    DumpSentence s;
    s.id = std::string(r.Bytes(id_len));
    if (s.id.empty() || unicode::FindInvalidUtf8(s.id)) {
      report.problems.push_back(where + ": empty or invalid UTF-8 id");
    } else if (!ids.insert(s.id).second) {
      report.problems.push_back(where + ": duplicate id " + s.id);
    }
    const std::uint8_t lang = r.U8();
    if (lang > 1) {
      report.problems.push_back(where + ": bad lang code " +
                                std::to_string(lang));
    }
    s.lang = lang == 1 ? Lang::kAr : Lang::kEn;
    s.n_tokens = r.U32();
    const std::size_t bitmap_len = (s.n_tokens + 7) / 8;
    const std::size_t n_values =
        static_cast<std::size_t>(report.n_layers) * s.n_tokens * report.dim;
    if (!r.Has(bitmap_len) || r.remaining() - bitmap_len < 4 * n_values) {
      report.problems.push_back(where + ": truncated vectors");
      return;
    }
    if (s.n_tokens == 0) report.problems.push_back(where + ": no tokens");
    const std::string_view bitmap = r.Bytes(bitmap_len);
    s.special.resize(s.n_tokens);
    for (std::uint32_t i = 0; i < s.n_tokens; ++i) {
      s.special[i] = (static_cast<std::uint8_t>(bitmap[i / 8]) >> (i % 8)) & 1;
    }
    if (s.n_tokens % 8 != 0 &&
        (static_cast<std::uint8_t>(bitmap.back()) >> (s.n_tokens % 8)) != 0) {
      report.problems.push_back(where + ": nonzero bitmap padding");
    }
    s.values.resize(n_values);
    bool finite = true;
    for (float& v : s.values) {
      v = r.F32();
      finite = finite && std::isfinite(v);
    }
    if (!finite) report.problems.push_back(where + ": non-finite value");
    if (sentences) sentences->push_back(std::move(s));
  }
  if (r.remaining() != 0) {
    report.problems.push_back(std::to_string(r.remaining()) +
                              " trailing bytes");
  }
}

}  // namespace

CheckReport CheckDumpBytes(std::string_view bytes) {
  CheckReport report;
  Parse(bytes, report, nullptr);
  return report;
}

CheckReport CheckDump(const std::filesystem::path& path) {
  return CheckDumpBytes(ReadFile(path));
}

std::string CheckReport::ToJson() const {
  nlohmann::ordered_json j;
  j["ok"] = ok();
  j["version"] = version;
  j["n_layers"] = n_layers;
  j["dim"] = dim;
  j["n_sentences"] = n_sentences;
  j["problems"] = problems;
  return j.dump(2);
}

EmbeddingDump ReadDump(const std::filesystem::path& path) {
  const std::string bytes = ReadFile(path);
  CheckReport report;
  std::vector<DumpSentence> sentences;
  Parse(bytes, report, &sentences);
  if (!report.ok()) {
    throw InputError(path.string() + ": " + report.problems.front());
  }
  EmbeddingDump dump(path.stem().string(), report.n_layers, report.dim);
  for (auto& s : sentences) dump.Add(std::move(s));
  return dump;
}

std::vector<double> SentenceRepr(const EmbeddingDump& dump,
                                 const DumpSentence& s, std::size_t layer) {
  if (layer >= dump.n_layers()) throw InputError("layer out of range");
  std::vector<double> sum(dump.dim(), 0.0);
  std::size_t count = 0;
  for (std::uint32_t t = 0; t < s.n_tokens; ++t) {
    if (s.special[t]) continue;
    const auto v = dump.Vector(s, layer, t);
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += v[d];
    ++count;
  }
  if (count == 0) {
    throw InputError("sentence " + s.id + " has only special tokens");
  }
  for (double& x : sum) x /= static_cast<double>(count);
  return sum;
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("cosine of mismatched sizes");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw InputError("cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

Alignment ReadAlignment(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  Alignment out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (unicode::CollapseWhitespace(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos ||
        tab == 0 || tab + 1 == line.size()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected en_id<TAB>ar_id");
    }
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> RandomPairs(
    const Alignment& sorted, const ProfileOptions& options) {
  const std::size_t n = sorted.size();
  if (n < 2) throw InputError("random pairing needs at least 2 aligned pairs");
  const std::set<std::pair<std::string, std::string>> bitext(sorted.begin(),
                                                             sorted.end());
  auto bad = [&](std::size_t i, std::size_t j) {
    if (options.pairing == RandomPairing::kWithinLanguage) {
      return sorted[i].first == sorted[j].first;
    }
    return bitext.count({sorted[i].first, sorted[j].second}) > 0;
  };
  // Sattolo's algorithm yields a single cycle, so no index maps to itself.
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  Rng rng(DeriveSeed(options.seed, "xsim-random", "", 0));
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(p[i], p[rng.UniformInt(i)]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!bad(i, p[i])) continue;
    bool fixed = false;
    for (std::size_t step = 1; step < n && !fixed; ++step) {
      const std::size_t k = (i + step) % n;
      if (!bad(i, p[k]) && !bad(k, p[i])) {
        std::swap(p[i], p[k]);
        fixed = true;
      }
    }
    if (!fixed) {
      throw InputError("cannot pair sentences randomly without reproducing "
                       "an aligned pair");
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {i, p[i]};
  return out;
}

std::string SimilarityProfile::ToCsv() const {
  std::string out = "layer,condition,mean_cosine,count\n";
  char buf[128];
  for (std::size_t l = 0; l < bitext.size(); ++l) {
    std::snprintf(buf, sizeof(buf), "%zu,bitext,%.9f,%zu\n", l + 1, bitext[l],
                  pair_count);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%zu,random,%.9f,%zu\n", l + 1, random[l],
                  pair_count);
    out += buf;
  }
  return out;
}

namespace {

struct Prepared {
  Alignment alignment;
  std::vector<const DumpSentence*> en;
  std::vector<const DumpSentence*> ar;
  std::vector<std::pair<std::size_t, std::size_t>> random;
};

Prepared Prepare(const EmbeddingDump& en, const EmbeddingDump& ar,
                 Alignment alignment, const ProfileOptions& options) {
  if (en.n_layers() != ar.n_layers() || en.dim() != ar.dim()) {
    throw InputError("dumps disagree on n_layers or dim");
  }
  if (alignment.empty()) throw InputError("empty alignment");
  std::sort(alignment.begin(), alignment.end());
  Prepared p;
  std::vector<std::string> missing;
  for (const auto& [en_id, ar_id] : alignment) {
    p.en.push_back(en.Find(en_id));
    p.ar.push_back(ar.Find(ar_id));
    if (!p.en.back()) missing.push_back("en:" + en_id);
    if (!p.ar.back()) missing.push_back("ar:" + ar_id);
  }
  if (!missing.empty()) {
    std::string msg = "alignment references " +
                      std::to_string(missing.size()) + " missing ids:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) {
      msg += " " + missing[i];
    }
    if (missing.size() > 20) msg += " ...";
    throw InputError(msg);
  }
  p.random = RandomPairs(alignment, options);
  p.alignment = std::move(alignment);
  return p;
}

std::pair<double, double> LayerMeans(const EmbeddingDump& en,
                                     const EmbeddingDump& ar,
                                     const Prepared& p, std::size_t layer,
                                     RandomPairing pairing) {
  const std::size_t n = p.alignment.size();
  std::vector<std::vector<double>> en_repr(n);
  std::vector<std::vector<double>> ar_repr(n);
  for (std::size_t i = 0; i < n; ++i) {
    en_repr[i] = SentenceRepr(en, *p.en[i], layer);
    ar_repr[i] = SentenceRepr(ar, *p.ar[i], layer);
  }
  double bitext = 0.0;
  double random = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    bitext += Cosine(en_repr[i], ar_repr[i]);
    const auto [a, b] = p.random[i];
    random += pairing == RandomPairing::kWithinLanguage
                  ? Cosine(en_repr[a], en_repr[b])
                  : Cosine(en_repr[a], ar_repr[b]);
  }
  return {bitext / static_cast<double>(n), random / static_cast<double>(n)};
}

}  // namespace

SimilarityProfile ProfileSerial(const EmbeddingDump& en,
                                const EmbeddingDump& ar, Alignment alignment,
                                const ProfileOptions& options) {
  const Prepared p = Prepare(en, ar, std::move(alignment), options);
  SimilarityProfile profile;
  profile.pair_count = p.alignment.size();
  for (std::size_t l = 0; l < en.n_layers(); ++l) {
    const auto [b, r] = LayerMeans(en, ar, p, l, options.pairing);
    profile.bitext.push_back(b);
    profile.random.push_back(r);
  }
  return profile;
}

SimilarityProfile Profile(const EmbeddingDump& en, const EmbeddingDump& ar,
                          Alignment alignment, const ProfileOptions& options,
                          int threads) {
  const Prepared p = Prepare(en, ar, std::move(alignment), options);
  SimilarityProfile profile;
  profile.pair_count = p.alignment.size();
  const int layers = en.n_layers();
  profile.bitext.resize(layers);
  profile.random.resize(layers);
  std::string error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
  for (int l = 0; l < layers; ++l) {
    try {
      const auto [b, r] = LayerMeans(en, ar, p, l, options.pairing);
      profile.bitext[l] = b;
      profile.random[l] = r;
    } catch (const InputError& e) {
#pragma omp critical(xsim_error)
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw InputError(error);
  return profile;
}

}  // namespace enar::xsim
