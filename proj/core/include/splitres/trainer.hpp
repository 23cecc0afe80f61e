#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "splitres/corpus.hpp"
#include "splitres/metrics.hpp"
#include "splitres/model.hpp"
#include "splitres/model_config.hpp"
#include "splitres/optimizer.hpp"

namespace splitres {

// main: main corpus only. aux: auxiliary only (pre-training). concat:
// Bernoulli(0.5) corpus choice per step. annealing: p_main = t / T.
enum class StageMode { kMain, kAux, kConcat, kAnnealing };

std::string_view to_string(StageMode mode);
StageMode parse_stage_mode(std::string_view text);

struct StageConfig {
  std::string name;
  StageMode mode = StageMode::kMain;
  std::vector<std::filesystem::path> aux;
  // Unset budgets share the remaining total steps equally.
  std::optional<std::size_t> steps;
  // concat only: strict main/aux alternation instead of Bernoulli draws.
  bool alternate = false;
};

struct TrainConfig {
  std::uint64_t seed = 1;
  ModelConfig model;
  OptimizerConfig optimizer;
  std::filesystem::path main_corpus;
  std::filesystem::path dev_corpus;
  std::size_t total_steps = 200000;
  // 0 disables intermediate checkpoints.
  std::size_t checkpoint_interval = 0;
  // Dev evaluation period; 0 evaluates only after training.
  std::size_t eval_interval = 0;
  // Keep the parameters with the best dev lenient F1 seen at evaluations.
  bool keep_best_dev = false;
  bool extend_anaphors = true;
  bool carry_optimizer_state = false;
  std::filesystem::path init_checkpoint;
  std::vector<StageConfig> stages;

  // Canonical JSON of the parsed config; hashed into checkpoints.
  std::string canonical;
};

// Accepts either an explicit "stages" list or the "strategy" shorthand
// (none | concat | pretrain | annealing) with an "aux" path list. Relative
// paths resolve against `base_dir`. Throws std::invalid_argument.
TrainConfig parse_train_config(std::string_view json, const std::filesystem::path& base_dir = {});
TrainConfig load_train_config(const std::filesystem::path& path);
std::string train_config_hash(const TrainConfig& config);

// Step budget of every stage after the equal-split default is applied.
std::vector<std::size_t> stage_budgets(const TrainConfig& config);

struct TrainInputs {
  Corpus main;
  // One merged auxiliary corpus per stage (empty for main-only stages).
  std::vector<Corpus> stage_aux;
  std::optional<Corpus> dev;
};

// Reads every corpus the config names. Auxiliary corpora may hold
// one-antecedent items.
TrainInputs load_train_inputs(const TrainConfig& config);

struct LogEntry {
  std::size_t step = 0;  // 1-based, resets per stage
  std::string stage;
  std::string corpus;  // "main" or "aux"
  std::string doc_id;
  double loss = 0;
};

std::string log_header();
std::string format_log_entry(const LogEntry& entry);

struct DevEntry {
  std::size_t global_step = 0;
  std::string stage;
  MetricReport report;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t global_step, const std::string& stage, const std::string& what);
  std::size_t global_step() const { return step_; }

 private:
  std::size_t step_;
};

struct TrainOptions {
  // When set: train.log.tsv, model.ckpt.json and step checkpoints go here.
  std::filesystem::path out_dir;
  // Called after every optimizer step with the live model.
  std::function<void(const LogEntry&, const CorefModel&)> on_step;
};

struct TrainResult {
  std::unique_ptr<CorefModel> model;
  std::vector<LogEntry> log;
  std::vector<DevEntry> dev;
  std::size_t steps = 0;
};

TrainResult train(const TrainConfig& config, const TrainInputs& inputs,
                  const TrainOptions& options = {});

// Two-stage run: auxiliary only, then main only, parameters carried over.
// Throws std::invalid_argument unless the config has exactly that shape.
TrainResult pretrain_finetune(const TrainConfig& config, const TrainInputs& inputs,
                              const TrainOptions& options = {});

}  // namespace splitres
