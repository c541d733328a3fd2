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

// Serial reference kernels against their OpenMP counterparts. Arg(0) runs
// the serial version; Arg(n) runs the parallel version on n threads.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "enar/balance.h"
#include "enar/codeswitch.h"
#include "enar/corpus.h"
#include "enar/lexicon.h"
#include "enar/mlm.h"
#include "enar/vocab.h"
#include "enar/xsim.h"

namespace enar {
namespace {

std::string Word(std::mt19937_64& rng) {
  std::string w;
  const int len = 2 + static_cast<int>(rng() % 6);
  for (int i = 0; i < len; ++i) w += static_cast<char>('a' + rng() % 8);
  return w;
}

const std::vector<Sentence>& Corpus() {
  static const std::vector<Sentence> corpus = [] {
    std::mt19937_64 rng(1);
    std::vector<Sentence> out;
    for (int i = 0; i < 20000; ++i) {
      Sentence s;
      s.doc_id = "doc" + std::to_string(i / 10);
      s.index = i % 10;
      s.lang = Lang::kEn;
      s.source = static_cast<Source>(rng() % 4);
      const int n = 5 + static_cast<int>(rng() % 25);
      for (int k = 0; k < n; ++k) s.tokens.push_back(Word(rng));
      out.push_back(std::move(s));
    }
    return out;
  }();
  return corpus;
}

const vocab::SubwordVocab& Vocab() {
  static const vocab::SubwordVocab v = [] {
    vocab::WordPieceOptions options;
    options.size = 2000;
    return vocab::TrainWordPiece(vocab::CountWordsSerial(Corpus(), true),
                                 options);
  }();
  return v;
}

const std::vector<mlm::PackedPair>& Pairs() {
  static const std::vector<mlm::PackedPair> pairs = [] {
    mlm::PackOptions options;
    options.seed = 3;
    return mlm::PackSerial(Corpus(), Vocab(), options);
  }();
  return pairs;
}

void BM_Count(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(threads == 0 ? balance::CountSerial(Corpus())
                                          : balance::Count(Corpus(), threads));
  }
}
BENCHMARK(BM_Count)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_CountWords(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        threads == 0 ? vocab::CountWordsSerial(Corpus(), true)
                     : vocab::CountWords(Corpus(), true, threads));
  }
}
BENCHMARK(BM_CountWords)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_Augment(benchmark::State& state) {
  static const lexicon::BilingualLexicon en2ar = [] {
    std::mt19937_64 rng(2);
    lexicon::BilingualLexicon lex({Lang::kEn, Lang::kAr});
    for (int i = 0; i < 3000; ++i) {
      lex.Add(Word(rng), "x" + Word(rng),
              static_cast<lexicon::Tier>(rng() % 3));
    }
    return lex;
  }();
  static const lexicon::BilingualLexicon ar2en = lexicon::Invert(en2ar);
  codeswitch::CodeSwitchConfig config;
  config.seed = 4;
  const codeswitch::CodeSwitcher switcher(en2ar, ar2en, config);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        threads == 0 ? codeswitch::AugmentSerial(Corpus(), switcher)
                     : codeswitch::Augment(Corpus(), switcher, threads));
  }
}
BENCHMARK(BM_Augment)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_Pack(benchmark::State& state) {
  mlm::PackOptions options;
  options.seed = 3;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        threads == 0 ? mlm::PackSerial(Corpus(), Vocab(), options)
                     : mlm::Pack(Corpus(), Vocab(), options, threads));
  }
}
BENCHMARK(BM_Pack)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_MaskAll(benchmark::State& state) {
  mlm::MaskingPolicy policy;
  policy.seed = 5;
  const mlm::Masker masker(Vocab(), policy, 128);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        threads == 0 ? mlm::MaskAllSerial(Pairs(), masker)
                     : mlm::MaskAll(Pairs(), masker, threads));
  }
}
BENCHMARK(BM_MaskAll)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_Profile(benchmark::State& state) {
  static xsim::EmbeddingDump en("en", 12, 64);
  static xsim::EmbeddingDump ar("ar", 12, 64);
  static xsim::Alignment alignment;
  if (alignment.empty()) {
    std::mt19937_64 rng(6);
    std::normal_distribution<float> g;
    for (int i = 0; i < 1000; ++i) {
      for (auto* dump : {&en, &ar}) {
        xsim::DumpSentence s;
        s.id = dump->model_name() + std::to_string(i);
        s.lang = dump == &en ? Lang::kEn : Lang::kAr;
        s.n_tokens = 16;
        s.special.assign(16, false);
        s.values.resize(12 * 16 * 64);
        for (auto& v : s.values) v = g(rng);
        dump->Add(std::move(s));
      }
      alignment.push_back({"en" + std::to_string(i), "ar" + std::to_string(i)});
    }
  }
  xsim::ProfileOptions options;
  options.seed = 7;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        threads == 0 ? xsim::ProfileSerial(en, ar, alignment, options)
                     : xsim::Profile(en, ar, alignment, options, threads));
  }
}
BENCHMARK(BM_Profile)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

}  // namespace
}  // namespace enar

BENCHMARK_MAIN();
