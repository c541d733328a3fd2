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

#include "enar/cli.h"

#include <omp.h>
#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>

#include "enar/balance.h"
#include "enar/codeswitch.h"
#include "enar/corpus.h"
#include "enar/errors.h"
#include "enar/ie.h"
#include "enar/lexicon.h"
#include "enar/mlm.h"
#include "enar/unicode.h"
#include "enar/version.h"
#include "enar/vocab.h"
#include "enar/xsim.h"

namespace enar::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string Sha256File(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 unavailable");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

fs::path ManifestPath(const fs::path& output) {
  std::string s = output.string();
  while (s.size() > 1 && s.back() == '/') s.pop_back();
  return fs::path(s + ".manifest.json");
}

namespace {

struct Globals {
  int threads = 1;
};

// Records what a stage read and wrote, then writes the manifest.
class Stage {
 public:
  Stage(std::string name, const Globals& globals)
      : name_(std::move(name)),
        globals_(globals),
        start_(std::chrono::steady_clock::now()) {}

  ordered_json config = ordered_json::object();
  ordered_json extra = ordered_json::object();
  std::optional<std::uint64_t> seed;

  void Input(const fs::path& p) { inputs_.push_back(p); }
  void Output(const fs::path& p) {
    if (outputs_.empty()) {
      anchor_ = p;
      std::error_code ec;
      fs::remove(ManifestPath(p), ec);
    }
    outputs_.push_back(p);
  }

  void Finish() const {
    if (outputs_.empty()) return;
    ordered_json m;
    m["tool"] = "enar";
    m["version"] = kVersion;
    m["subcommand"] = name_;
    m["config"] = config;
    m["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    m["threads"] = globals_.threads;
    m["inputs"] = Digests(inputs_);
    m["outputs"] = Digests(outputs_);
    m["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    for (const auto& [k, v] : extra.items()) m[k] = v;
    std::ofstream out(ManifestPath(anchor_), std::ios::binary);
    out << m.dump(2) << '\n';
    if (!out) throw InputError("cannot write manifest for " + anchor_.string());
  }

 private:
  static ordered_json Digests(const std::vector<fs::path>& paths) {
    ordered_json list = ordered_json::array();
    for (const auto& p : paths) {
      if (fs::is_directory(p)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(p)) {
          if (e.is_regular_file()) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
          list.push_back({{"path", f.string()}, {"sha256", Sha256File(f)}});
        }
      } else {
        list.push_back({{"path", p.string()}, {"sha256", Sha256File(p)}});
      }
    }
    return list;
  }

  std::string name_;
  const Globals& globals_;
  std::chrono::steady_clock::time_point start_;
  std::vector<fs::path> inputs_;
  std::vector<fs::path> outputs_;
  fs::path anchor_;
};

void Require(const std::string& value, std::string_view flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

std::uint64_t RequireSeed(const std::optional<std::uint64_t>& seed) {
  if (!seed) throw ConfigError("--seed is required for this stage");
  return *seed;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed: " + path.string());
}

template <typename Items, typename Fn>
void WriteJsonl(const fs::path& path, const Items& items, Fn to_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& item : items) out << to_json(item) << '\n';
  if (!out) throw InputError("write failed: " + path.string());
}

std::vector<Sentence> SplitAll(const std::vector<Document>& docs,
                               const std::unordered_set<std::string>& abbrevs,
                               int threads) {
  std::vector<std::vector<Sentence>> parts(docs.size());
  const auto n = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    parts[i] = corpus::SplitSentences(docs[i], abbrevs);
  }
  std::vector<Sentence> out;
  for (auto& p : parts) {
    for (auto& s : p) out.push_back(std::move(s));
  }
  return out;
}

using Action = std::function<int()>;

struct Registry {
  std::vector<std::pair<CLI::App*, Action>> actions;
  void Add(CLI::App* app, Action action) {
    actions.emplace_back(app, std::move(action));
  }
};

void AddIngest(CLI::App& app, Registry& reg, const Globals& g,
               std::ostream& err) {
  struct Opts {
    std::string in, out, lang, source = "other", emit = "sentences";
    std::string abbreviations, errors;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("ingest", "Read raw text into JSONL records");
  sub->add_option("--in", o->in, "Input file or directory");
  sub->add_option("--out", o->out, "Output JSONL");
  sub->add_option("--lang", o->lang, "en or ar");
  sub->add_option("--source", o->source, "gigaword, wiki, oscar or other")
      ->capture_default_str();
  sub->add_option("--emit", o->emit, "sentences or documents")
      ->capture_default_str();
  sub->add_option("--abbreviations", o->abbreviations,
                  "English abbreviation guard list (default: built in)");
  sub->add_option("--errors", o->errors, "Write record errors as JSONL");
  reg.Add(sub, [o, &g, &err] {
    Require(o->in, "--in");
    Require(o->out, "--out");
    Require(o->lang, "--lang");
    const Lang lang = ParseLang(o->lang);
    const Source source = ParseSource(o->source);
    if (o->emit != "sentences" && o->emit != "documents") {
      throw ConfigError("--emit must be sentences or documents");
    }
    Stage stage("ingest", g);
    stage.config = {{"in", o->in},          {"out", o->out},
                    {"lang", o->lang},      {"source", o->source},
                    {"emit", o->emit},      {"abbreviations", o->abbreviations},
                    {"errors", o->errors}};
    stage.Input(o->in);
    if (!o->abbreviations.empty()) stage.Input(o->abbreviations);
    stage.Output(o->out);
    if (!fs::exists(o->in)) throw InputError("no such input: " + o->in);
    corpus::IngestResult r = corpus::Ingest(o->in, source, lang);
    for (const auto& e : r.errors) {
      err << e.file << ": record " << e.record << " (byte " << e.byte_offset
          << "): " << e.message << '\n';
    }
    if (!o->errors.empty()) {
      stage.Output(o->errors);
      WriteJsonl(o->errors, r.errors, [](const RecordError& e) {
        return ordered_json{{"file", e.file},
                            {"record", e.record},
                            {"byte_offset", e.byte_offset},
                            {"message", e.message}}
            .dump();
      });
    }
    std::size_t written = 0;
    if (o->emit == "documents") {
      WriteJsonl(o->out, r.documents,
                 [](const Document& d) { return corpus::ToJson(d); });
      written = r.documents.size();
    } else {
      const auto abbrevs = o->abbreviations.empty()
                               ? corpus::DefaultAbbreviations()
                               : corpus::LoadAbbreviations(o->abbreviations);
      const auto sentences = SplitAll(r.documents, abbrevs, g.threads);
      corpus::WriteSentences(o->out, sentences);
      written = sentences.size();
    }
    stage.extra["documents"] = r.documents.size();
    stage.extra["record_errors"] = r.errors.size();
    stage.extra["records_written"] = written;
    stage.Finish();
    return 0;
  });
}

void AddStats(CLI::App& app, Registry& reg, const Globals& g,
              std::ostream& out) {
  struct Opts {
    std::string in, out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("stats", "Token and sentence counts");
  sub->add_option("--in", o->in, "Sentence JSONL");
  sub->add_option("--out", o->out, "Output JSON (default: stdout)");
  reg.Add(sub, [o, &g, &out] {
    Require(o->in, "--in");
    Stage stage("stats", g);
    stage.config = {{"in", o->in}, {"out", o->out}};
    stage.Input(o->in);
    const auto sentences = corpus::ReadSentences(o->in);
    const std::string json =
        balance::Count(sentences, g.threads).ToJson() + "\n";
    if (o->out.empty()) {
      out << json;
    } else {
      stage.Output(o->out);
      WriteText(o->out, json);
    }
    stage.Finish();
    return 0;
  });
}

void AddBalance(CLI::App& app, Registry& reg, const Globals& g) {
  struct Opts {
    std::string in, out, plan;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("balance", "Up-sample corpus portions");
  sub->add_option("--in", o->in, "Sentence JSONL");
  sub->add_option("--out", o->out, "Output JSONL");
  sub->add_option("--plan", o->plan,
                  "TOML plan with a [multipliers] table (default: ar.wiki=5, "
                  "ar.gigaword=3)");
  reg.Add(sub, [o, &g] {
    Require(o->in, "--in");
    Require(o->out, "--out");
    const balance::BalancePlan plan = o->plan.empty()
                                          ? balance::BalancePlan::Default()
                                          : balance::BalancePlan::FromToml(o->plan);
    Stage stage("balance", g);
    ordered_json multipliers = ordered_json::object();
    for (const auto& [key, m] : plan.multipliers()) {
      multipliers[std::string(LangName(key.first)) + "." +
                  std::string(SourceName(key.second))] = m;
    }
    stage.config = {{"in", o->in},
                    {"out", o->out},
                    {"plan", o->plan},
                    {"multipliers", multipliers}};
    stage.Input(o->in);
    if (!o->plan.empty()) stage.Input(o->plan);
    stage.Output(o->out);
    stage.extra["sentences_written"] = balance::UpsampleFile(o->in, o->out, plan);
    stage.Finish();
    return 0;
  });
}

void AddTrainVocab(CLI::App& app, Registry& reg, const Globals& g) {
  struct Opts {
    std::string in, out, scheme = "wordpiece", lang = "all";
    std::size_t size = 50000;
    bool cased = false;
    std::uint64_t min_frequency = 2;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("train-vocab", "Train a subword vocabulary");
  sub->add_option("--in", o->in, "Sentence JSONL");
  sub->add_option("--out", o->out, "Vocabulary file");
  sub->add_option("--scheme", o->scheme, "wordpiece or unigram")
      ->capture_default_str();
  sub->add_option("--size", o->size, "Vocabulary size")->capture_default_str();
  sub->add_flag("--cased,!--uncased", o->cased,
                "Keep case and accents (default: uncased)");
  sub->add_option("--lang", o->lang, "Train on en, ar or all sentences")
      ->capture_default_str();
  sub->add_option("--min-frequency", o->min_frequency,
                  "Minimum pair (wordpiece) or substring (unigram) frequency")
      ->capture_default_str();
  reg.Add(sub, [o, &g] {
    Require(o->in, "--in");
    Require(o->out, "--out");
    const vocab::Scheme scheme = vocab::ParseScheme(o->scheme);
    std::optional<Lang> only;
    if (o->lang != "all") only = ParseLang(o->lang);
    Stage stage("train-vocab", g);
    stage.config = {{"in", o->in},         {"out", o->out},
                    {"scheme", o->scheme}, {"size", o->size},
                    {"cased", o->cased},   {"lang", o->lang},
                    {"min_frequency", o->min_frequency}};
    stage.Input(o->in);
    stage.Output(o->out);
    stage.Output(vocab::SubwordVocab::MetaPath(o->out));
    std::vector<Sentence> sentences = corpus::ReadSentences(o->in);
    if (only) {
      std::erase_if(sentences,
                    [&](const Sentence& s) { return s.lang != *only; });
    }
    if (sentences.empty()) throw InputError("no sentences to train on");
    vocab::SubwordVocab v(scheme, o->cased);
    if (scheme == vocab::Scheme::kWordPiece) {
      vocab::WordPieceOptions opts;
      opts.size = o->size;
      opts.cased = o->cased;
      opts.min_pair_frequency = o->min_frequency;
      opts.threads = g.threads;
      v = vocab::TrainWordPiece(sentences, opts);
    } else {
      vocab::UnigramOptions opts;
      opts.size = o->size;
      opts.cased = o->cased;
      opts.min_frequency = o->min_frequency;
      opts.threads = g.threads;
      v = vocab::TrainUnigram(sentences, opts);
    }
    v.Save(o->out);
    const vocab::Composition c = vocab::VocabComposition(v);
    stage.extra["size"] = v.size();
    stage.extra["placeholders"] = v.PlaceholderCount();
    stage.extra["composition"] = {{"en", c.en}, {"ar", c.ar}, {"other", c.other}};
    stage.Finish();
    return 0;
  });
}

void AddMergeVocab(CLI::App& app, Registry& reg, const Globals& g) {
  struct Opts {
    std::vector<std::string> in;
    std::string out;
    std::size_t target = 50000;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand(
      "merge-vocab", "Union two vocabularies, padding with unused pieces");
  sub->add_option("--in", o->in, "Two vocabulary files")->expected(2);
  sub->add_option("--out", o->out, "Merged vocabulary file");
  sub->add_option("--target", o->target, "Final size")->capture_default_str();
  reg.Add(sub, [o, &g] {
    if (o->in.size() != 2) throw ConfigError("--in takes exactly two files");
    Require(o->out, "--out");
    Stage stage("merge-vocab", g);
    stage.config = {{"in", o->in}, {"out", o->out}, {"target", o->target}};
    for (const auto& p : o->in) {
      stage.Input(p);
      stage.Input(vocab::SubwordVocab::MetaPath(p));
    }
    stage.Output(o->out);
    stage.Output(vocab::SubwordVocab::MetaPath(o->out));
    const auto a = vocab::SubwordVocab::Load(o->in[0]);
    const auto b = vocab::SubwordVocab::Load(o->in[1]);
    const auto merged = vocab::MergeVocabs(a, b, o->target);
    merged.Save(o->out);
    stage.extra["size"] = merged.size();
    stage.extra["placeholders"] = merged.PlaceholderCount();
    stage.Finish();
    return 0;
  });
}

void AddSegment(CLI::App& app, Registry& reg, const Globals& g,
                std::ostream& out) {
  struct Opts {
    std::string vocab, in, out;
    bool ids = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand(
      "segment", "Segment whitespace-separated text into subword pieces");
  sub->add_option("--vocab", o->vocab, "Vocabulary file");
  sub->add_option("--in", o->in, "Text file, one line per output line");
  sub->add_option("--out", o->out, "Output file (default: stdout)");
  sub->add_flag("--ids", o->ids, "Print piece ids instead of pieces");
  reg.Add(sub, [o, &g, &out] {
    Require(o->vocab, "--vocab");
    Require(o->in, "--in");
    Stage stage("segment", g);
    stage.config = {
        {"vocab", o->vocab}, {"in", o->in}, {"out", o->out}, {"ids", o->ids}};
    stage.Input(o->vocab);
    stage.Input(vocab::SubwordVocab::MetaPath(o->vocab));
    stage.Input(o->in);
    const auto v = vocab::SubwordVocab::Load(o->vocab);
    std::ifstream in(o->in, std::ios::binary);
    if (!in) throw InputError("cannot open " + o->in);
    std::string text;
    std::string line;
    while (std::getline(in, line)) {
      if (unicode::FindInvalidUtf8(line)) {
        throw InputError(o->in + ": malformed UTF-8");
      }
      std::string row;
      for (const auto& word : unicode::SplitWhitespace(line)) {
        const vocab::Segmentation s = vocab::Segment(word, v);
        for (std::size_t i = 0; i < s.ids.size(); ++i) {
          if (!row.empty()) row.push_back(' ');
          row += o->ids ? std::to_string(s.ids[i]) : v.Piece(s.ids[i]);
        }
      }
      text += row + "\n";
    }
    if (o->out.empty()) {
      out << text;
    } else {
      stage.Output(o->out);
      WriteText(o->out, text);
    }
    stage.Finish();
    return 0;
  });
}

void AddLexicon(CLI::App& app, Registry& reg, const Globals& g,
                std::ostream& err) {
  struct Opts {
    std::vector<std::string> muse, panlex, wiki, canonical;
    std::string direction = "en-ar", out, stats;
    bool invert = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand(
      "lexicon", "Merge dictionary sources into a tiered canonical lexicon");
  sub->add_option("--muse", o->muse, "MUSE pair files");
  sub->add_option("--panlex", o->panlex, "PanLex TSV files");
  sub->add_option("--wiki", o->wiki, "Parallel Wikipedia title TSV files");
  sub->add_option("--canonical", o->canonical, "Canonical lexicon files");
  sub->add_option("--direction", o->direction, "Source-target languages")
      ->capture_default_str();
  sub->add_flag("--invert", o->invert, "Write the reverse direction");
  sub->add_option("--out", o->out, "Canonical TSV output");
  sub->add_option("--stats", o->stats, "Per-tier statistics JSON");
  reg.Add(sub, [o, &g, &err] {
    Require(o->out, "--out");
    const lexicon::Direction dir = lexicon::ParseDirection(o->direction);
    Stage stage("lexicon", g);
    stage.config = {{"muse", o->muse},       {"panlex", o->panlex},
                    {"wiki", o->wiki},       {"canonical", o->canonical},
                    {"direction", o->direction}, {"invert", o->invert},
                    {"out", o->out},         {"stats", o->stats}};
    std::vector<lexicon::BilingualLexicon> parts;
    auto load = [&](const std::vector<std::string>& files,
                    lexicon::Format format) {
      for (const auto& f : files) {
        stage.Input(f);
        auto r = lexicon::Load(f, format, dir);
        for (const auto& w : r.warnings) {
          err << f << ":" << w.line << ": " << w.message << '\n';
        }
        parts.push_back(std::move(r.lexicon));
      }
    };
    load(o->wiki, lexicon::Format::kWikiTitles);
    load(o->panlex, lexicon::Format::kPanlex);
    load(o->muse, lexicon::Format::kMuse);
    load(o->canonical, lexicon::Format::kCanonical);
    if (parts.empty()) throw ConfigError("no dictionary files given");
    stage.Output(o->out);
    lexicon::BilingualLexicon merged = lexicon::Merge(parts);
    if (o->invert) merged = lexicon::Invert(merged);
    lexicon::Save(merged, o->out);
    const std::string stats = lexicon::Stats(merged).ToJson() + "\n";
    if (!o->stats.empty()) {
      stage.Output(o->stats);
      WriteText(o->stats, stats);
    }
    stage.extra["entries"] = merged.size();
    stage.Finish();
    return 0;
  });
}

codeswitch::Mode ParseMode(const std::string& mode) {
  if (mode == "s1") return codeswitch::Mode::kFromScratch;
  if (mode == "s2") return codeswitch::Mode::kContinued;
  throw ConfigError("--mode must be s1 or s2");
}

void AddCodeswitch(CLI::App& app, Registry& reg, const Globals& g) {
  struct Opts {
    std::string in, out, report, trace, mode = "s2";
    std::vector<std::string> lexicon, lexicon_ar_en;
    double sent = 0.5;
    double tok = 0.3;
    std::vector<std::string> dicts = {"wiki", "panlex", "muse"};
    std::optional<std::uint64_t> seed;
    bool case_sensitive = false;
    std::string matrix_out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand(
      "codeswitch", "Substitute dictionary translations into sentences");
  sub->add_option("--in", o->in, "Sentence JSONL");
  sub->add_option("--out", o->out, "Output sentence JSONL");
  sub->add_option("--report", o->report, "SwitchReport JSON");
  sub->add_option("--trace", o->trace, "Per-sentence replacement JSONL");
  sub->add_option("--lexicon", o->lexicon, "Canonical en-ar lexicon files");
  sub->add_option("--lexicon-ar-en", o->lexicon_ar_en,
                  "Canonical ar-en lexicon files (default: inverse of "
                  "--lexicon)");
  sub->add_option("--sent", o->sent, "Sentence replacement threshold")
      ->capture_default_str();
  sub->add_option("--tok", o->tok, "Token replacement threshold")
      ->capture_default_str();
  sub->add_option("--dicts", o->dicts, "Enabled dictionaries")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--mode", o->mode, "s1 or s2 (naming only)")
      ->capture_default_str();
  sub->add_option("--seed", o->seed, "Master seed");
  sub->add_flag("--case-sensitive", o->case_sensitive,
                "Match lexicon keys without case folding");
  auto* matrix = sub->add_subcommand(
      "matrix", "Write the 18 ablation configurations as TOML files");
  matrix->add_option("--out", o->matrix_out, "Output directory");

  reg.Add(matrix, [o, &g] {
    Require(o->matrix_out, "--out");
    Stage stage("codeswitch matrix", g);
    stage.config = {{"out", o->matrix_out}};
    fs::create_directories(o->matrix_out);
    ordered_json names = ordered_json::array();
    for (codeswitch::CodeSwitchConfig c : codeswitch::ConfigMatrix()) {
      if (o->seed) c.seed = *o->seed;
      WriteText(fs::path(o->matrix_out) / (c.Name() + ".toml"), c.ToToml());
      names.push_back(c.Name());
    }
    stage.Output(o->matrix_out);
    stage.extra["configurations"] = names;
    stage.Finish();
    return 0;
  });

  reg.Add(sub, [o, &g] {
    codeswitch::CodeSwitchConfig c;
    c.sentence_threshold = o->sent;
    c.token_threshold = o->tok;
    c.dictionaries.clear();
    for (const auto& d : o->dicts) {
      const auto t = lexicon::ParseTier(d);
      if (std::find(c.dictionaries.begin(), c.dictionaries.end(), t) ==
          c.dictionaries.end()) {
        c.dictionaries.push_back(t);
      }
    }
    std::sort(c.dictionaries.begin(), c.dictionaries.end());
    c.mode = ParseMode(o->mode);
    c.case_insensitive = !o->case_sensitive;
    c.Validate();
    c.seed = RequireSeed(o->seed);
    Require(o->in, "--in");
    Require(o->out, "--out");
    if (o->lexicon.empty()) throw ConfigError("--lexicon is required");

    Stage stage("codeswitch", g);
    stage.seed = c.seed;
    stage.config = {{"name", c.Name()},
                    {"sent", c.sentence_threshold},
                    {"tok", c.token_threshold},
                    {"dicts", o->dicts},
                    {"mode", o->mode},
                    {"case_sensitive", o->case_sensitive},
                    {"in", o->in},
                    {"out", o->out},
                    {"lexicon", o->lexicon},
                    {"lexicon_ar_en", o->lexicon_ar_en},
                    {"report", o->report},
                    {"trace", o->trace}};
    stage.Input(o->in);
    auto load = [&](const std::vector<std::string>& files,
                    lexicon::Direction dir) {
      std::vector<lexicon::BilingualLexicon> parts;
      for (const auto& f : files) {
        stage.Input(f);
        parts.push_back(
            lexicon::Load(f, lexicon::Format::kCanonical, dir).lexicon);
      }
      return lexicon::Merge(parts);
    };
    const auto en2ar = load(o->lexicon, {Lang::kEn, Lang::kAr});
    const auto ar2en = o->lexicon_ar_en.empty()
                           ? lexicon::Invert(en2ar)
                           : load(o->lexicon_ar_en, {Lang::kAr, Lang::kEn});
    stage.Output(o->out);
    const codeswitch::CodeSwitcher switcher(en2ar, ar2en, c);
    const auto sentences = corpus::ReadSentences(o->in);
    const auto result = codeswitch::Augment(sentences, switcher, g.threads);
    corpus::WriteSentences(o->out, result.sentences);
    if (!o->report.empty()) {
      stage.Output(o->report);
      WriteText(o->report, result.report.ToJson() + "\n");
    }
    if (!o->trace.empty()) {
      stage.Output(o->trace);
      std::ofstream t(o->trace, std::ios::binary);
      if (!t) throw InputError("cannot write " + o->trace);
      for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto& tr = result.traces[i];
        ordered_json j;
        j["doc_id"] = sentences[i].doc_id;
        j["index"] = sentences[i].index;
        j["selected"] = tr.selected;
        j["words"] = tr.word_count;
        j["budget"] = tr.budget;
        j["replacements"] = ordered_json::array();
        for (const auto& r : tr.replacements) {
          j["replacements"].push_back({{"begin", r.begin},
                                       {"length", r.length},
                                       {"source", r.source},
                                       {"target", r.target},
                                       {"tier", lexicon::TierName(r.tier)}});
        }
        t << j.dump() << '\n';
      }
    }
    stage.extra["realized_sentence_fraction"] =
        result.report.realized_sentence_fraction();
    stage.extra["report"] = ordered_json::parse(result.report.ToJson());
    stage.Finish();
    return 0;
  });
}

void AddMlm(CLI::App& app, Registry& reg, const Globals& g) {
  struct Opts {
    std::string in, vocab, out, scheme = "whole_word";
    int max_len = 128;
    double mask_rate = 0.15;
    bool no_nsp = false;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("mlm", "Build masked-LM training examples");
  sub->add_option("--in", o->in, "Sentence JSONL");
  sub->add_option("--vocab", o->vocab, "Vocabulary file");
  sub->add_option("--out", o->out, "Binary example file");
  sub->add_option("--max-len", o->max_len, "128 or 512")->capture_default_str();
  sub->add_option("--scheme", o->scheme, "whole_word or subword")
      ->capture_default_str();
  sub->add_option("--mask-rate", o->mask_rate)->capture_default_str();
  sub->add_flag("--no-nsp", o->no_nsp, "Single segments, no sentence pairs");
  sub->add_option("--seed", o->seed, "Master seed");
  reg.Add(sub, [o, &g] {
    mlm::PackOptions pack;
    pack.max_len = o->max_len;
    pack.next_sentence = !o->no_nsp;
    pack.Validate();
    mlm::MaskingPolicy policy;
    policy.scheme = mlm::ParseMaskScheme(o->scheme);
    policy.mask_rate = o->mask_rate;
    policy.Validate();
    pack.seed = policy.seed = RequireSeed(o->seed);
    Require(o->in, "--in");
    Require(o->vocab, "--vocab");
    Require(o->out, "--out");
    Stage stage("mlm", g);
    stage.seed = pack.seed;
    stage.config = {{"in", o->in},           {"vocab", o->vocab},
                    {"out", o->out},         {"max_len", o->max_len},
                    {"max_predictions", mlm::MaxPredictions(o->max_len)},
                    {"scheme", o->scheme},   {"mask_rate", o->mask_rate},
                    {"nsp", !o->no_nsp}};
    stage.Input(o->in);
    stage.Input(o->vocab);
    stage.Input(vocab::SubwordVocab::MetaPath(o->vocab));
    stage.Output(o->out);
    const auto v = vocab::SubwordVocab::Load(o->vocab);
    const auto sentences = corpus::ReadSentences(o->in);
    const auto pairs = mlm::Pack(sentences, v, pack, g.threads);
    const mlm::Masker masker(v, policy, o->max_len);
    const auto examples = mlm::MaskAll(pairs, masker, g.threads);
    stage.extra["examples"] = mlm::WriteExamples(examples, o->max_len, o->out);
    stage.Finish();
    return 0;
  });
}

void AddIe(CLI::App& app, Registry& reg, const Globals& g) {
  auto* ie = app.add_subcommand("ie", "Build IE instances and splits");
  ie->require_subcommand(1);

  struct Opts {
    std::string in, out;
    double negative_ratio = 1.0;
    std::vector<double> fractions = {0.8, 0.1, 0.1};
    std::optional<std::uint64_t> seed;
  };
  auto arl = std::make_shared<Opts>();
  auto* build_arl =
      ie->add_subcommand("build-arl", "Trigger-entity argument instances");
  build_arl->add_option("--in", arl->in, "Annotated document JSONL");
  build_arl->add_option("--out", arl->out, "Instance JSONL");
  build_arl->add_option("--seed", arl->seed, "Accepted for uniformity");
  reg.Add(build_arl, [arl, &g] {
    Require(arl->in, "--in");
    Require(arl->out, "--out");
    Stage stage("ie build-arl", g);
    stage.seed = arl->seed;
    stage.config = {{"in", arl->in}, {"out", arl->out}};
    stage.Input(arl->in);
    stage.Output(arl->out);
    const auto docs = ie::ReadDocs(arl->in);
    const auto instances = ie::BuildArlAll(docs, g.threads);
    WriteJsonl(arl->out, instances,
               [](const ie::Instance& i) { return ie::ToJson(i); });
    stage.extra["instances"] = instances.size();
    stage.Finish();
    return 0;
  });

  auto re = std::make_shared<Opts>();
  auto* build_re =
      ie->add_subcommand("build-re", "Entity-pair relation instances");
  build_re->add_option("--in", re->in, "Annotated document JSONL");
  build_re->add_option("--out", re->out, "Instance JSONL");
  build_re->add_option("--negative-ratio", re->negative_ratio,
                       "Negatives sampled per gold relation")
      ->capture_default_str();
  build_re->add_option("--seed", re->seed, "Master seed");
  reg.Add(build_re, [re, &g] {
    ie::ReOptions options;
    options.negative_ratio = re->negative_ratio;
    options.Validate();
    options.seed = RequireSeed(re->seed);
    Require(re->in, "--in");
    Require(re->out, "--out");
    Stage stage("ie build-re", g);
    stage.seed = options.seed;
    stage.config = {{"in", re->in},
                    {"out", re->out},
                    {"negative_ratio", re->negative_ratio}};
    stage.Input(re->in);
    stage.Output(re->out);
    const auto docs = ie::ReadDocs(re->in);
    const auto instances = ie::BuildReAll(docs, options, g.threads);
    WriteJsonl(re->out, instances,
               [](const ie::Instance& i) { return ie::ToJson(i); });
    stage.extra["instances"] = instances.size();
    stage.extra["fallback_rate"] = ie::MeanRelationsPerSentence(docs);
    stage.Finish();
    return 0;
  });

  auto sp = std::make_shared<Opts>();
  auto* split = ie->add_subcommand("split", "Document-level train/dev/test");
  split->add_option("--in", sp->in, "Annotated document JSONL");
  split->add_option("--out", sp->out, "Split JSON");
  split->add_option("--fractions", sp->fractions, "train,dev,test")
      ->delimiter(',')
      ->capture_default_str();
  split->add_option("--seed", sp->seed, "Master seed");
  reg.Add(split, [sp, &g] {
    if (sp->fractions.size() != 3) {
      throw ConfigError("--fractions takes three values");
    }
    const std::uint64_t seed = RequireSeed(sp->seed);
    Require(sp->in, "--in");
    Require(sp->out, "--out");
    Stage stage("ie split", g);
    stage.seed = seed;
    stage.config = {
        {"in", sp->in}, {"out", sp->out}, {"fractions", sp->fractions}};
    stage.Input(sp->in);
    stage.Output(sp->out);
    const auto docs = ie::ReadDocs(sp->in);
    std::vector<std::string> ids;
    for (const auto& d : docs) ids.push_back(d.doc_id);
    const ie::DocSplit s = ie::SplitDocs(
        ids, {sp->fractions[0], sp->fractions[1], sp->fractions[2]}, seed);
    const ordered_json j = {
        {"train", s.train}, {"dev", s.dev}, {"test", s.test}};
    WriteText(sp->out, j.dump(2) + "\n");
    stage.Finish();
    return 0;
  });
}

void AddXsim(CLI::App& app, Registry& reg, const Globals& g,
             std::ostream& out) {
  auto* xs = app.add_subcommand("xsim", "Cross-lingual embedding similarity");
  xs->require_subcommand(1);

  struct ProfileOpts {
    std::string en, ar, alignment, out;
    bool within_language = false;
    std::optional<std::uint64_t> seed;
  };
  auto p = std::make_shared<ProfileOpts>();
  auto* profile = xs->add_subcommand(
      "profile", "Per-layer mean cosine for aligned and random pairs");
  profile->add_option("--en", p->en, "English EMBD dump");
  profile->add_option("--ar", p->ar, "Arabic EMBD dump");
  profile->add_option("--alignment", p->alignment, "en_id<TAB>ar_id pairs");
  profile->add_option("--out", p->out, "CSV output (default: stdout)");
  profile->add_flag("--within-language", p->within_language,
                    "Random pairs within English instead of across languages");
  profile->add_option("--seed", p->seed, "Master seed");
  reg.Add(profile, [p, &g, &out] {
    xsim::ProfileOptions options;
    options.seed = RequireSeed(p->seed);
    options.pairing = p->within_language ? xsim::RandomPairing::kWithinLanguage
                                         : xsim::RandomPairing::kCrossLingual;
    Require(p->en, "--en");
    Require(p->ar, "--ar");
    Require(p->alignment, "--alignment");
    Stage stage("xsim profile", g);
    stage.seed = options.seed;
    stage.config = {{"en", p->en},
                    {"ar", p->ar},
                    {"alignment", p->alignment},
                    {"out", p->out},
                    {"within_language", p->within_language}};
    stage.Input(p->en);
    stage.Input(p->ar);
    stage.Input(p->alignment);
    const auto en = xsim::ReadDump(p->en);
    const auto ar = xsim::ReadDump(p->ar);
    const auto profile_result = xsim::Profile(
        en, ar, xsim::ReadAlignment(p->alignment), options, g.threads);
    const std::string csv = profile_result.ToCsv();
    if (p->out.empty()) {
      out << csv;
    } else {
      stage.Output(p->out);
      WriteText(p->out, csv);
    }
    stage.extra["models"] = {en.model_name(), ar.model_name()};
    stage.extra["pairs"] = profile_result.pair_count;
    stage.Finish();
    return 0;
  });

  struct CheckOpts {
    std::string in, out;
  };
  auto c = std::make_shared<CheckOpts>();
  auto* check = xs->add_subcommand("check", "Validate an EMBD dump");
  check->add_option("--in", c->in, "EMBD dump");
  check->add_option("--out", c->out, "Report JSON (default: stdout)");
  reg.Add(check, [c, &g, &out] {
    Require(c->in, "--in");
    Stage stage("xsim check", g);
    stage.config = {{"in", c->in}, {"out", c->out}};
    stage.Input(c->in);
    const xsim::CheckReport report = xsim::CheckDump(c->in);
    if (c->out.empty()) {
      out << report.ToJson() << '\n';
    } else {
      stage.Output(c->out);
      WriteText(c->out, report.ToJson() + "\n");
    }
    if (!report.ok()) return 1;
    stage.Finish();
    return 0;
  });
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Bilingual English-Arabic pre-training data toolkit", "enar"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML config file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::ignore_all);
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  Globals globals;
  globals.threads = std::max(1, omp_get_num_procs());
  app.add_option("--threads", globals.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  Registry reg;
  AddIngest(app, reg, globals, err);
  AddStats(app, reg, globals, out);
  AddBalance(app, reg, globals);
  AddTrainVocab(app, reg, globals);
  AddMergeVocab(app, reg, globals);
  AddSegment(app, reg, globals, out);
  AddLexicon(app, reg, globals, err);
  AddCodeswitch(app, reg, globals);
  AddMlm(app, reg, globals);
  AddIe(app, reg, globals);
  AddXsim(app, reg, globals, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  // The deepest parsed subcommand owns the run.
  const Action* action = nullptr;
  int best_depth = -1;
  for (const auto& [sub, fn] : reg.actions) {
    if (!sub->parsed()) continue;
    int depth = 0;
    for (const CLI::App* a = sub; a->get_parent(); a = a->get_parent()) ++depth;
    if (depth > best_depth) {
      best_depth = depth;
      action = &fn;
    }
  }
  if (!action) {
    err << "error: nothing to run\n";
    return 2;
  }
  try {
    return (*action)();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv = {"enar"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return Run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace enar::cli
