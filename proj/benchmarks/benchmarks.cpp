#include <benchmark/benchmark.h>

#include "splitres/baselines.hpp"
#include "splitres/metrics.hpp"
#include "splitres/model.hpp"
#include "splitres/optimizer.hpp"
#include "splitres/synthetic.hpp"

namespace splitres {
namespace {

ModelConfig bench_config() {
  ModelConfig m;
  m.word_dim = 0;
  m.char_dim = 16;
  m.char_filters = 20;
  m.lstm_hidden = 16;
  m.width_dim = 8;
  m.distance_dim = 8;
  m.ffnn_hidden = 128;
  return m;
}

Corpus bench_corpus(std::size_t tokens) {
  SyntheticConfig sc;
  sc.num_docs = 4;
  sc.tokens_per_doc = tokens;
  return generate_synthetic(sc);
}

void BM_EncodeMentions(benchmark::State& state) {
  const Corpus c = bench_corpus(static_cast<std::size_t>(state.range(0)));
  const CorefModel model(bench_config(), Vocabulary::from_corpora({&c}), 1);
  for (auto _ : state) benchmark::DoNotOptimize(model.encoder().encode_mentions(c.documents[0]));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeMentions)->Arg(120)->Arg(480);

void BM_PredictDocument(benchmark::State& state) {
  const Corpus c = bench_corpus(static_cast<std::size_t>(state.range(0)));
  const CorefModel model(bench_config(), Vocabulary::from_corpora({&c}), 1);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(c.documents[0]));
}
BENCHMARK(BM_PredictDocument)->Arg(120)->Arg(480);

void BM_TrainStep(benchmark::State& state) {
  const Corpus c = bench_corpus(120);
  CorefModel model(bench_config(), Vocabulary::from_corpora({&c}), 1);
  Adam adam(model.params(), OptimizerConfig{}, 1000000);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.accumulate_gradients(c.documents[k++ % c.documents.size()]));
    adam.step();
  }
}
BENCHMARK(BM_TrainStep);

void BM_LenientScores(benchmark::State& state) {
  SyntheticConfig sc;
  sc.num_docs = static_cast<std::size_t>(state.range(0));
  const Corpus gold = generate_synthetic(sc);
  const PredictionSet pred = baseline_recent_m(gold, 3);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_predictions(pred, gold, true));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(gold.anaphor_count()));
}
BENCHMARK(BM_LenientScores)->Arg(50)->Arg(500);

}  // namespace
}  // namespace splitres

BENCHMARK_MAIN();
