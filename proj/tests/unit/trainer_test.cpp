#include <gtest/gtest.h>

#include <filesystem>

#include "builders.hpp"
#include "splitres/aux_builders.hpp"
#include "splitres/checkpoint.hpp"
#include "splitres/metrics.hpp"
#include "splitres/synthetic.hpp"
#include "splitres/trainer.hpp"

namespace splitres {
namespace {

ModelConfig small_model() {
  ModelConfig m;
  m.word_dim = 0;
  m.char_dim = 8;
  m.char_filters = 8;
  m.lstm_hidden = 8;
  m.width_dim = 4;
  m.distance_dim = 4;
  m.ffnn_hidden = 32;
  return m;
}

Corpus synth(std::size_t docs, std::uint64_t seed, const std::string& prefix) {
  SyntheticConfig c;
  c.num_docs = docs;
  c.seed = seed;
  c.doc_prefix = prefix;
  return generate_synthetic(c);
}

TrainConfig base_config(std::size_t steps) {
  TrainConfig c;
  c.main_corpus = "main.jsonl";
  c.total_steps = steps;
  c.model = small_model();
  c.optimizer.learning_rate = 5e-3;
  return c;
}

TEST(ParseTrainConfig, StrategyShorthands) {
  auto none = parse_train_config(R"({"main_corpus":"m.jsonl","total_steps":10})", "/base");
  ASSERT_EQ(none.stages.size(), 1u);
  EXPECT_EQ(none.stages[0].mode, StageMode::kMain);
  EXPECT_EQ(none.main_corpus, std::filesystem::path("/base/m.jsonl"));

  auto concat_no_aux = parse_train_config(R"({"main_corpus":"m","strategy":"concat"})");
  EXPECT_EQ(concat_no_aux.stages[0].mode, StageMode::kMain);

  auto pre = parse_train_config(
      R"({"main_corpus":"m","strategy":"pretrain","aux":["a.jsonl"],"total_steps":7})");
  ASSERT_EQ(pre.stages.size(), 2u);
  EXPECT_EQ(stage_budgets(pre), (std::vector<std::size_t>{7, 7}));

  auto anneal = parse_train_config(R"({"main_corpus":"m","strategy":"annealing","aux":"a"})");
  EXPECT_EQ(anneal.stages[0].mode, StageMode::kAnnealing);
  EXPECT_EQ(anneal.total_steps, 200000u);
}

TEST(ParseTrainConfig, ChainedStages) {
  const auto c = parse_train_config(R"({
    "main_corpus": "arrau.jsonl", "total_steps": 9,
    "stages": [
      {"name": "crowd", "mode": "pretrain", "aux": ["pd-crowd.jsonl"]},
      {"name": "coref", "mode": "annealing", "aux": ["single-coref.jsonl"]}
    ]})");
  ASSERT_EQ(c.stages.size(), 2u);
  EXPECT_EQ(c.stages[0].mode, StageMode::kAux);
  EXPECT_EQ(c.stages[1].mode, StageMode::kAnnealing);
  EXPECT_EQ(stage_budgets(c), (std::vector<std::size_t>{4, 5}));
}

TEST(ParseTrainConfig, RejectsInvalid) {
  const char* bad[] = {
      R"({"total_steps":1})",
      R"({"main_corpus":"m","total_steps":0})",
      R"({"main_corpus":"m","bogus":1})",
      R"({"main_corpus":"m","strategy":"sideways"})",
      R"({"main_corpus":"m","strategy":"annealing"})",
      R"({"main_corpus":"m","stages":[{"mode":"concat"}]})",
      R"({"main_corpus":"m","stages":[{"mode":"aux","aux":"a"}]})",
      R"({"main_corpus":"m","stages":[{"mode":"main"},{"mode":"main"}]})",
      R"({"main_corpus":"m","total_steps":5,"stages":[{"mode":"aux","aux":"a","steps":9},{"mode":"main"}]})",
      R"({"main_corpus":"m","model":{"lstm_hidden":0}})",
      R"({"main_corpus":"m","optimizer":{"learning_rate":-1}})",
      "[1,2]",
      "{not json",
  };
  for (const char* text : bad) EXPECT_THROW(parse_train_config(text), std::invalid_argument) << text;
}

TEST(ParseTrainConfig, MissingFileNamesPath) {
  try {
    load_train_config("/nonexistent/cfg.json");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/cfg.json"), std::string::npos);
  }
}

TEST(ParseTrainConfig, HashDependsOnContent) {
  const auto a = parse_train_config(R"({"main_corpus":"m","seed":1})");
  const auto b = parse_train_config(R"({"main_corpus":"m","seed":2})");
  EXPECT_NE(train_config_hash(a), train_config_hash(b));
  EXPECT_EQ(train_config_hash(a), train_config_hash(parse_train_config(R"({"main_corpus":"m","seed":1})")));
}

TEST(Train, DeterministicPerSeed) {
  TrainConfig config = base_config(30);
  config.stages.push_back({"concat", StageMode::kConcat, {"aux"}, std::nullopt, false});
  TrainInputs in{synth(4, 1, "main"), {synth(6, 2, "aux")}, std::nullopt};
  const auto a = train(config, in);
  const auto b = train(config, in);
  ASSERT_EQ(a.log.size(), 30u);
  for (std::size_t k = 0; k < a.log.size(); ++k) {
    EXPECT_EQ(a.log[k].doc_id, b.log[k].doc_id);
    EXPECT_EQ(a.log[k].loss, b.log[k].loss);
  }
  config.seed = 2;
  const auto c = train(config, in);
  bool differs = false;
  for (std::size_t k = 0; k < a.log.size(); ++k) differs = differs || a.log[k].doc_id != c.log[k].doc_id;
  EXPECT_TRUE(differs);
}

TEST(Train, StepCounterResetsPerStageAndLogIsWritten) {
  const auto dir = testing::fresh_dir("train-log");
  TrainConfig config = base_config(10);
  config.checkpoint_interval = 4;
  config.stages.push_back({"pre", StageMode::kAux, {"aux"}, 6, false});
  config.stages.push_back({"fine", StageMode::kMain, {}, std::nullopt, false});
  TrainInputs in{synth(3, 1, "main"), {synth(3, 2, "aux"), Corpus{}}, std::nullopt};
  const auto r = pretrain_finetune(config, in, {dir, {}});
  ASSERT_EQ(r.log.size(), 10u);
  EXPECT_EQ(r.log[5].step, 6u);
  EXPECT_EQ(r.log[5].stage, "pre");
  EXPECT_EQ(r.log[5].corpus, "aux");
  EXPECT_EQ(r.log[6].step, 1u);
  EXPECT_EQ(r.log[6].stage, "fine");
  EXPECT_EQ(r.log[6].corpus, "main");

  const std::string log = testing::read_text(dir / "train.log.tsv");
  EXPECT_EQ(log.rfind(log_header(), 0), 0u);
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 11);
  EXPECT_TRUE(std::filesystem::exists(dir / "step-4.ckpt.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "step-8.ckpt.json"));
  CheckpointInfo info;
  load_checkpoint(dir / "model.ckpt.json", &info);
  EXPECT_EQ(info.step, 10u);
  EXPECT_EQ(info.stage, "fine");
  EXPECT_EQ(info.config_hash, train_config_hash(config));
}

TEST(Train, ZeroStepFineTuneKeepsPretrainedParameters) {
  const auto dir = testing::fresh_dir("train-zero-finetune");
  TrainConfig config = base_config(8);
  config.checkpoint_interval = 8;
  config.stages.push_back({"pre", StageMode::kAux, {"aux"}, 8, false});
  config.stages.push_back({"fine", StageMode::kMain, {}, 0, false});
  TrainInputs in{synth(3, 1, "main"), {synth(3, 2, "aux"), Corpus{}}, std::nullopt};
  pretrain_finetune(config, in, {dir, {}});
  const auto pre = load_checkpoint(dir / "step-8.ckpt.json");
  const auto fin = load_checkpoint(dir / "model.ckpt.json");
  for (std::size_t k = 0; k < pre->params().all().size(); ++k) {
    EXPECT_EQ(pre->params().all()[k].value, fin->params().all()[k].value);
  }
}

TEST(Train, PretrainFinetuneNeedsTwoStages) {
  TrainConfig config = base_config(5);
  config.stages.push_back({"main", StageMode::kMain, {}, std::nullopt, false});
  TrainInputs in{synth(2, 1, "main"), {Corpus{}}, std::nullopt};
  EXPECT_THROW(pretrain_finetune(config, in), std::invalid_argument);
}

TEST(Train, EmptyAuxCorpusRejected) {
  TrainConfig config = base_config(5);
  config.stages.push_back({"concat", StageMode::kConcat, {"aux"}, std::nullopt, false});
  TrainInputs in{synth(2, 1, "main"), {Corpus{}}, std::nullopt};
  EXPECT_THROW(train(config, in), std::invalid_argument);
}

TEST(Train, AlternateConcatInterleaves) {
  TrainConfig config = base_config(6);
  config.stages.push_back({"concat", StageMode::kConcat, {"aux"}, std::nullopt, true});
  TrainInputs in{synth(2, 1, "main"), {synth(2, 2, "aux")}, std::nullopt};
  const auto r = train(config, in);
  for (std::size_t k = 0; k < r.log.size(); ++k) EXPECT_EQ(r.log[k].corpus, k % 2 ? "aux" : "main");
}

TEST(Train, ChainedCrowdThenSingleCorefAnnealing) {
  SyntheticConfig pd_config;
  pd_config.num_docs = 6;
  pd_config.crowd_annotators = 3;
  pd_config.doc_prefix = "pd";
  const Corpus pd = generate_synthetic(pd_config);
  TrainConfig config = base_config(20);
  config.stages.push_back({"crowd", StageMode::kAux, {"crowd"}, std::nullopt, false});
  config.stages.push_back({"coref", StageMode::kAnnealing, {"coref"}, std::nullopt, false});
  TrainInputs in{synth(3, 1, "main"),
                 {build_crowd(pd).corpus, build_single_coref(synth(4, 3, "arrau")).corpus},
                 std::nullopt};
  const auto r = train(config, in);
  ASSERT_EQ(r.log.size(), 20u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(r.log[k].stage, "crowd");
  for (std::size_t k = 10; k < 20; ++k) EXPECT_EQ(r.log[k].stage, "coref");
  EXPECT_EQ(r.log[0].doc_id.rfind("pd", 0), 0u);
}

TEST(Train, DevEvaluationAndBestKeeping) {
  TrainConfig config = base_config(20);
  config.eval_interval = 10;
  config.keep_best_dev = true;
  config.stages.push_back({"main", StageMode::kMain, {}, std::nullopt, false});
  TrainInputs in{synth(3, 1, "main"), {Corpus{}}, synth(3, 5, "dev")};
  const auto r = train(config, in);
  ASSERT_EQ(r.dev.size(), 2u);
  EXPECT_EQ(r.dev[0].global_step, 10u);
  const double best = std::max(r.dev[0].report.f1, r.dev[1].report.f1);
  EXPECT_DOUBLE_EQ(evaluate_predictions(r.model->predict(*in.dev), *in.dev).f1, best);
}

TEST(Train, InitCheckpointWithOtherVocabularyRejected) {
  const auto dir = testing::fresh_dir("train-init");
  TrainConfig config = base_config(2);
  config.stages.push_back({"main", StageMode::kMain, {}, std::nullopt, false});
  train(config, {synth(2, 1, "main"), {Corpus{}}, std::nullopt}, {dir, {}});
  config.init_checkpoint = dir / "model.ckpt.json";
  EXPECT_NO_THROW(train(config, {synth(2, 1, "main"), {Corpus{}}, std::nullopt}));
  EXPECT_THROW(train(config, {synth(2, 9, "other"), {Corpus{}}, std::nullopt}), CheckpointError);
}

TEST(Train, FineTuningDoesNotLoseToPretrainingAlone) {
  const Corpus main = synth(10, 21, "main");
  TrainConfig config = base_config(800);
  config.stages.push_back({"pre", StageMode::kAux, {"aux"}, std::nullopt, false});
  config.stages.push_back({"fine", StageMode::kMain, {}, std::nullopt, false});
  double pretrain_only = -1;
  TrainOptions options;
  options.on_step = [&](const LogEntry& e, const CorefModel& model) {
    if (e.stage == "pre" && e.step == 400) {
      pretrain_only = evaluate_predictions(model.predict(main), main).f1;
    }
  };
  const auto r = pretrain_finetune(config, {main, {synth(40, 22, "aux"), Corpus{}}, std::nullopt},
                                   options);
  const double final_f1 = evaluate_predictions(r.model->predict(main), main).f1;
  EXPECT_GE(final_f1, pretrain_only);
}

TEST(TrainingDiverged, MessageNamesStep) {
  const TrainingDiverged e(17, "fine", "non-finite loss");
  EXPECT_EQ(e.global_step(), 17u);
  EXPECT_NE(std::string(e.what()).find("step 17"), std::string::npos);
}

TEST(StageMode, ParseAliases) {
  EXPECT_EQ(parse_stage_mode("pre-train"), StageMode::kAux);
  EXPECT_EQ(parse_stage_mode("finetune"), StageMode::kMain);
  EXPECT_THROW(parse_stage_mode("sideways"), std::invalid_argument);
}

}  // namespace
}  // namespace splitres
