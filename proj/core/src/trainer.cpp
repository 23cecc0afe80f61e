#include "splitres/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "splitres/checkpoint.hpp"
#include "splitres/embeddings.hpp"
#include "splitres/hash.hpp"
#include "splitres/schedule.hpp"

namespace splitres {

using nlohmann::json;

std::string_view to_string(StageMode mode) {
  switch (mode) {
    case StageMode::kMain: return "main";
    case StageMode::kAux: return "aux";
    case StageMode::kConcat: return "concat";
    case StageMode::kAnnealing: return "annealing";
  }
  return "main";
}

StageMode parse_stage_mode(std::string_view text) {
  if (text == "main" || text == "finetune" || text == "fine-tune") return StageMode::kMain;
  if (text == "aux" || text == "pretrain" || text == "pre-train") return StageMode::kAux;
  if (text == "concat") return StageMode::kConcat;
  if (text == "annealing") return StageMode::kAnnealing;
  throw std::invalid_argument("unknown stage mode: " + std::string(text));
}

namespace {

bool uses_aux(StageMode mode) { return mode != StageMode::kMain; }
bool uses_main(StageMode mode) { return mode != StageMode::kAux; }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

std::vector<std::filesystem::path> path_list(const json& j, const std::filesystem::path& base) {
  std::vector<std::filesystem::path> out;
  if (j.is_string()) {
    out.push_back(resolve(base, j.get<std::string>()));
  } else {
    for (const auto& e : j) out.push_back(resolve(base, e.get<std::string>()));
  }
  return out;
}

void check_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw std::invalid_argument("unknown key in " + where + ": " + item.key());
  }
}

OptimizerConfig parse_optimizer(const json& j) {
  check_keys(j, {"learning_rate", "beta1", "beta2", "eps", "clip_norm", "final_lr_fraction"},
             "optimizer");
  OptimizerConfig o;
  o.learning_rate = j.value("learning_rate", o.learning_rate);
  o.beta1 = j.value("beta1", o.beta1);
  o.beta2 = j.value("beta2", o.beta2);
  o.eps = j.value("eps", o.eps);
  o.clip_norm = j.value("clip_norm", o.clip_norm);
  o.final_lr_fraction = j.value("final_lr_fraction", o.final_lr_fraction);
  if (!(o.learning_rate > 0)) throw std::invalid_argument("optimizer.learning_rate must be > 0");
  return o;
}

void validate(const TrainConfig& c) {
  if (c.main_corpus.empty()) throw std::invalid_argument("main_corpus is required");
  if (c.total_steps == 0) throw std::invalid_argument("total_steps must be positive");
  if (c.stages.empty()) throw std::invalid_argument("at least one stage is required");
  for (const auto& s : c.stages) {
    if (uses_aux(s.mode) && s.aux.empty()) {
      throw std::invalid_argument("stage " + s.name + " (" + std::string(to_string(s.mode)) +
                                  ") needs at least one auxiliary corpus");
    }
    if (!uses_aux(s.mode) && !s.aux.empty()) {
      throw std::invalid_argument("stage " + s.name + " trains on main only but lists aux corpora");
    }
    if (s.alternate && s.mode != StageMode::kConcat) {
      throw std::invalid_argument("alternate applies to concat stages only");
    }
  }
  if (!uses_main(c.stages.back().mode)) {
    throw std::invalid_argument("the final stage must train on the main corpus");
  }
  for (std::size_t k = 0; k + 1 < c.stages.size(); ++k) {
    if (c.stages[k].mode == StageMode::kMain) {
      throw std::invalid_argument("only the final stage may train on the main corpus alone");
    }
  }
  (void)stage_budgets(c);
}

}  // namespace

TrainConfig parse_train_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  check_keys(j,
             {"seed", "model", "optimizer", "main_corpus", "dev_corpus", "total_steps",
              "checkpoint_interval", "eval_interval", "keep_best_dev", "extend_anaphors",
              "carry_optimizer_state", "init_checkpoint", "stages", "strategy", "aux"},
             "config");

  TrainConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    if (j.contains("model")) c.model = model_config_from_json(j.at("model").dump());
    if (j.contains("optimizer")) c.optimizer = parse_optimizer(j.at("optimizer"));
    if (j.contains("main_corpus")) c.main_corpus = resolve(base_dir, j.at("main_corpus").get<std::string>());
    if (j.contains("dev_corpus")) c.dev_corpus = resolve(base_dir, j.at("dev_corpus").get<std::string>());
    if (j.contains("init_checkpoint")) {
      c.init_checkpoint = resolve(base_dir, j.at("init_checkpoint").get<std::string>());
    }
    c.total_steps = j.value("total_steps", c.total_steps);
    c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
    c.eval_interval = j.value("eval_interval", c.eval_interval);
    c.keep_best_dev = j.value("keep_best_dev", c.keep_best_dev);
    c.extend_anaphors = j.value("extend_anaphors", c.extend_anaphors);
    c.carry_optimizer_state = j.value("carry_optimizer_state", c.carry_optimizer_state);

    if (j.contains("stages") && (j.contains("strategy") || j.contains("aux"))) {
      throw std::invalid_argument("give either stages or strategy/aux, not both");
    }
    if (j.contains("stages")) {
      std::size_t k = 0;
      for (const auto& js : j.at("stages")) {
        check_keys(js, {"name", "mode", "aux", "steps", "alternate"}, "stage");
        StageConfig s;
        s.name = js.value("name", "stage" + std::to_string(k));
        s.mode = parse_stage_mode(js.value("mode", "main"));
        if (js.contains("aux")) s.aux = path_list(js.at("aux"), base_dir);
        if (js.contains("steps")) s.steps = js.at("steps").get<std::size_t>();
        s.alternate = js.value("alternate", false);
        c.stages.push_back(std::move(s));
        ++k;
      }
    } else {
      const std::string strategy = j.value("strategy", "none");
      std::vector<std::filesystem::path> aux;
      if (j.contains("aux")) aux = path_list(j.at("aux"), base_dir);
      if (strategy == "none" || (strategy == "concat" && aux.empty())) {
        c.stages.push_back({"main", StageMode::kMain, {}, std::nullopt, false});
      } else if (strategy == "concat") {
        c.stages.push_back({"concat", StageMode::kConcat, aux, std::nullopt, false});
      } else if (strategy == "annealing") {
        c.stages.push_back({"annealing", StageMode::kAnnealing, aux, std::nullopt, false});
      } else if (strategy == "pretrain") {
        // Both stages run the full budget.
        c.stages.push_back({"pretrain", StageMode::kAux, aux, c.total_steps, false});
        c.stages.push_back({"finetune", StageMode::kMain, {}, c.total_steps, false});
      } else {
        throw std::invalid_argument("unknown strategy: " + strategy);
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  validate(c);
  c.canonical = j.dump();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_train_config(ss.str(), path.parent_path());
}

std::string train_config_hash(const TrainConfig& config) { return config_hash(config.canonical); }

std::vector<std::size_t> stage_budgets(const TrainConfig& config) {
  std::size_t fixed = 0, open = 0;
  for (const auto& s : config.stages) {
    if (s.steps) {
      fixed += *s.steps;
    } else {
      ++open;
    }
  }
  if (open > 0 && fixed > config.total_steps) {
    throw std::invalid_argument("explicit stage budgets exceed total_steps");
  }
  const std::size_t rest = open ? config.total_steps - fixed : 0;
  std::vector<std::size_t> out;
  std::size_t assigned = 0, seen = 0;
  for (const auto& s : config.stages) {
    if (s.steps) {
      out.push_back(*s.steps);
    } else {
      ++seen;
      const std::size_t share = seen == open ? rest - assigned : rest / open;
      assigned += share;
      out.push_back(share);
    }
  }
  return out;
}

TrainInputs load_train_inputs(const TrainConfig& config) {
  TrainInputs in;
  in.main = load_corpus(config.main_corpus);
  ValidationOptions aux_options;
  aux_options.min_antecedents = 1;
  for (const auto& s : config.stages) {
    Corpus merged;
    for (const auto& path : s.aux) {
      Corpus c = load_corpus(path, aux_options);
      if (merged.name.empty()) merged.name = c.name;
      for (auto& d : c.documents) merged.documents.push_back(std::move(d));
    }
    in.stage_aux.push_back(std::move(merged));
  }
  if (!config.dev_corpus.empty()) in.dev = load_corpus(config.dev_corpus);
  return in;
}

std::string log_header() { return "step\tstage\tcorpus\tdoc_id\tloss\n"; }

std::string format_log_entry(const LogEntry& e) {
  char loss[64];
  std::snprintf(loss, sizeof(loss), "%.6f", e.loss);
  return std::to_string(e.step) + "\t" + e.stage + "\t" + e.corpus + "\t" + e.doc_id + "\t" + loss +
         "\n";
}

TrainingDiverged::TrainingDiverged(std::size_t global_step, const std::string& stage,
                                   const std::string& what)
    : std::runtime_error("training diverged at step " + std::to_string(global_step) + " (stage " +
                         stage + "): " + what),
      step_(global_step) {}

TrainResult train(const TrainConfig& config, const TrainInputs& inputs,
                  const TrainOptions& options) {
  validate(config);
  if (inputs.stage_aux.size() != config.stages.size()) {
    throw std::invalid_argument("expected one auxiliary corpus slot per stage");
  }
  if (inputs.main.documents.empty()) throw std::invalid_argument("main corpus is empty");
  for (std::size_t k = 0; k < config.stages.size(); ++k) {
    if (uses_aux(config.stages[k].mode) && inputs.stage_aux[k].documents.empty()) {
      throw std::invalid_argument("auxiliary corpus of stage " + config.stages[k].name +
                                  " is empty");
    }
  }

  Corpus main = inputs.main;
  if (config.extend_anaphors) {
    for (auto& d : main.documents) d = extend_anaphors(d);
  }

  std::vector<const Corpus*> vocab_sources{&main};
  for (const auto& c : inputs.stage_aux) vocab_sources.push_back(&c);

  TrainResult result;
  result.model = std::make_unique<CorefModel>(config.model, Vocabulary::from_corpora(vocab_sources),
                                              mix_seed(config.seed, "init"));
  CorefModel& model = *result.model;
  if (!config.init_checkpoint.empty()) {
    const auto init = load_checkpoint(config.init_checkpoint);
    if (init->vocabulary().words() != model.vocabulary().words()) {
      throw CheckpointError("initial checkpoint vocabulary differs from the training corpora");
    }
    copy_parameters(*init, model);
  }

  const std::string hash = train_config_hash(config);
  std::ofstream log_file;
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    log_file.open(options.out_dir / "train.log.tsv");
    if (!log_file) throw std::runtime_error("cannot write training log in " + options.out_dir.string());
    log_file << log_header();
  }

  Rng rng(mix_seed(config.seed, "sample"));
  EpochSampler main_sampler(main.documents.size(), rng);
  const auto budgets = stage_budgets(config);
  std::size_t optimizer_total = 0;
  for (std::size_t b : budgets) optimizer_total += b;
  Adam adam(model.params(), config.optimizer,
            config.carry_optimizer_state ? optimizer_total : budgets.front());

  double best_f1 = -1;
  std::vector<Matrix> best;
  auto evaluate_dev = [&](const std::string& stage) {
    if (!inputs.dev) return;
    DevEntry e{result.steps, stage, evaluate_predictions(model.predict(*inputs.dev), *inputs.dev)};
    if (config.keep_best_dev && e.report.f1 > best_f1) {
      best_f1 = e.report.f1;
      best.clear();
      for (const auto& p : model.params().all()) best.push_back(p.value);
    }
    result.dev.push_back(std::move(e));
  };

  for (std::size_t k = 0; k < config.stages.size(); ++k) {
    const StageConfig& stage = config.stages[k];
    const std::size_t budget = budgets[k];
    if (k > 0 && !config.carry_optimizer_state) adam.reset(budget);

    const Corpus& aux = inputs.stage_aux[k];
    std::optional<EpochSampler> aux_sampler;
    if (uses_aux(stage.mode)) aux_sampler.emplace(aux.documents.size(), rng);

    for (std::size_t t = 0; t < budget; ++t) {
      CorpusChoice choice = CorpusChoice::kMain;
      switch (stage.mode) {
        case StageMode::kMain: choice = CorpusChoice::kMain; break;
        case StageMode::kAux: choice = CorpusChoice::kAux; break;
        case StageMode::kConcat:
          choice = stage.alternate ? (t % 2 == 0 ? CorpusChoice::kMain : CorpusChoice::kAux)
                                   : concat_next(rng);
          break;
        case StageMode::kAnnealing: choice = annealing_next(t, budget, rng); break;
      }
      const Document& doc = choice == CorpusChoice::kMain
                                ? main.documents[main_sampler.next()]
                                : aux.documents[aux_sampler->next()];

      ++result.steps;
      double loss = 0;
      try {
        loss = model.accumulate_gradients(doc);
      } catch (const std::runtime_error& e) {
        throw TrainingDiverged(result.steps, stage.name, e.what());
      }
      if (!std::isfinite(loss)) {
        throw TrainingDiverged(result.steps, stage.name, "non-finite loss on " + doc.doc_id);
      }
      adam.step();

      LogEntry entry{t + 1, stage.name, choice == CorpusChoice::kMain ? "main" : "aux", doc.doc_id,
                     loss};
      if (log_file) log_file << format_log_entry(entry);
      if (options.on_step) options.on_step(entry, model);
      result.log.push_back(std::move(entry));

      if (!options.out_dir.empty() && config.checkpoint_interval > 0 &&
          result.steps % config.checkpoint_interval == 0) {
        save_checkpoint(model, {hash, result.steps, stage.name},
                        options.out_dir / ("step-" + std::to_string(result.steps) + ".ckpt.json"));
      }
      if (config.eval_interval > 0 && result.steps % config.eval_interval == 0) {
        evaluate_dev(stage.name);
      }
    }
  }
  if (config.eval_interval == 0 || result.steps % config.eval_interval != 0 || result.steps == 0) {
    evaluate_dev(config.stages.back().name);
  }
  if (config.keep_best_dev && !best.empty()) {
    std::size_t k = 0;
    for (auto& p : model.params().all()) p.value = best[k++];
  }

  if (!options.out_dir.empty()) {
    save_checkpoint(model, {hash, result.steps, config.stages.back().name},
                    options.out_dir / "model.ckpt.json");
  }
  return result;
}

TrainResult pretrain_finetune(const TrainConfig& config, const TrainInputs& inputs,
                              const TrainOptions& options) {
  if (config.stages.size() != 2 || config.stages[0].mode != StageMode::kAux ||
      config.stages[1].mode != StageMode::kMain) {
    throw std::invalid_argument("pre-train/fine-tune needs an aux stage followed by a main stage");
  }
  return train(config, inputs, options);
}

}  // namespace splitres
