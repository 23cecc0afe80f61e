#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "splitres/aux_builders.hpp"
#include "splitres/baselines.hpp"
#include "splitres/checkpoint.hpp"
#include "splitres/corpus.hpp"
#include "splitres/hash.hpp"
#include "splitres/metrics.hpp"
#include "splitres/prediction.hpp"
#include "splitres/synthetic.hpp"
#include "splitres/trainer.hpp"
#include "splitres/version.hpp"

namespace splitres::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Bad flags, missing or invalid config: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

fs::path output_dir(const Globals& g, const std::string& fallback) {
  fs::path dir = g.out.empty() ? fs::path(fallback) : fs::path(g.out);
  fs::create_directories(dir);
  return dir;
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError(what + " is required");
  if (!fs::exists(path)) throw UsageError(what + " not found: " + path);
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& hash,
                    std::optional<std::uint64_t> seed, const std::vector<std::string>& inputs,
                    const std::string& started) {
  ordered_json j;
  j["command"] = command;
  j["config_hash"] = hash;
  if (seed) {
    j["seed"] = *seed;
  } else {
    j["seed"] = nullptr;
  }
  j["inputs"] = inputs;
  j["version"] = "splitres " + std::string(version());
  j["started"] = started;
  j["finished"] = utc_now();
  write_file(dir / "manifest.json", j.dump(2) + "\n");
}

Corpus load_gold(const std::string& path) {
  require_file(path, "corpus");
  return load_corpus(path);
}

// ---------------------------------------------------------------------------

int cmd_train(const Globals& g, std::ostream& out) {
  const std::string started = utc_now();
  require_file(g.config, "config file");
  TrainConfig config;
  try {
    config = load_train_config(g.config);
  } catch (const std::invalid_argument& e) {
    throw UsageError("invalid config " + g.config + ": " + e.what());
  }
  if (g.seed) config.seed = *g.seed;

  const TrainInputs inputs = load_train_inputs(config);
  const fs::path dir = output_dir(g, "runs/train");
  TrainResult result = train(config, inputs, {dir, {}});

  std::vector<std::string> paths{g.config, config.main_corpus.string()};
  for (const auto& s : config.stages) {
    for (const auto& p : s.aux) paths.push_back(p.string());
  }
  if (!config.dev_corpus.empty()) paths.push_back(config.dev_corpus.string());
  if (!result.dev.empty()) {
    ordered_json dev = ordered_json::array();
    for (const auto& e : result.dev) {
      dev.push_back({{"step", e.global_step},
                     {"stage", e.stage},
                     {"metrics", ordered_json::parse(report_to_json(e.report))}});
    }
    write_file(dir / "dev.json", dev.dump(2) + "\n");
  }
  write_manifest(dir, "train", train_config_hash(config), config.seed, paths, started);

  out << "trained " << result.steps << " steps over " << config.stages.size() << " stage(s)\n";
  if (!result.dev.empty()) {
    const auto& last = result.dev.back().report;
    out << "dev lenient F1 " << last.f1 << ", strict " << last.strict_accuracy << "\n";
  }
  out << "checkpoint: " << (dir / "model.ckpt.json").string() << "\n";
  return kExitOk;
}

struct EvalFlags {
  std::string checkpoint;
  std::string corpus;
  std::string baseline;
  bool breakdown = false;
  bool strict_only = false;
  bool table3 = false;
};

std::size_t recent_m(const std::string& baseline) {
  const std::string prefix = "recent-";
  if (baseline.rfind(prefix, 0) != 0) return 0;
  try {
    return std::stoul(baseline.substr(prefix.size()));
  } catch (const std::exception&) {
    throw UsageError("bad baseline " + baseline + " (expected recent-<m> or random)");
  }
}

PredictionSet run_baseline(const std::string& baseline, const Corpus& gold, std::uint64_t seed) {
  if (baseline == "random") return baseline_random(gold, seed);
  const std::size_t m = recent_m(baseline);
  if (m < 2 || m > 5) throw UsageError("bad baseline " + baseline + " (expected recent-2..5 or random)");
  return baseline_recent_m(gold, m);
}

int cmd_evaluate(const Globals& g, const EvalFlags& f, std::ostream& out) {
  const std::string started = utc_now();
  if (!f.table3 && f.checkpoint.empty() == f.baseline.empty()) {
    throw UsageError("evaluate needs exactly one of --checkpoint or --baseline (or --table3)");
  }
  if (!f.checkpoint.empty()) require_file(f.checkpoint, "checkpoint");
  const Corpus gold = load_gold(f.corpus);
  const std::uint64_t seed = g.seed.value_or(1);
  if (!f.baseline.empty() && f.baseline != "random") (void)run_baseline(f.baseline, Corpus{}, seed);

  struct System {
    std::string name;
    PredictionSet predictions;
  };
  std::vector<System> systems;
  if (f.table3) {
    for (int m = 2; m <= 5; ++m) {
      systems.push_back({"recent-" + std::to_string(m), baseline_recent_m(gold, m)});
    }
    systems.push_back({"random", baseline_random(gold, seed)});
  } else if (!f.baseline.empty()) {
    systems.push_back({f.baseline, run_baseline(f.baseline, gold, seed)});
  }
  if (!f.checkpoint.empty()) {
    const auto model = load_checkpoint(f.checkpoint);
    systems.push_back({"model", model->predict(gold)});
  }

  const fs::path dir = output_dir(g, "runs/evaluate");
  std::vector<TableRow> rows;
  ordered_json metrics = ordered_json::object();
  for (const auto& s : systems) {
    const MetricReport report = evaluate_predictions(s.predictions, gold, f.breakdown);
    rows.push_back({s.name, report});
    metrics[s.name] = ordered_json::parse(report_to_json(report, f.strict_only));
    const std::string file =
        systems.size() == 1 ? "predictions.jsonl" : "predictions-" + s.name + ".jsonl";
    save_predictions(s.predictions, dir / file);
  }
  if (f.baseline == "random" || f.table3) metrics["random_seed"] = seed;

  std::string table = report_table(rows, f.strict_only);
  if (f.breakdown) {
    for (const auto& row : rows) table += "\n" + row.system + "\n" + breakdown_table(row.report);
  }
  write_file(dir / "metrics.json",
             (systems.size() == 1 && !f.table3 ? metrics[systems.front().name] : metrics).dump(2) +
                 "\n");
  write_file(dir / "table.txt", table);

  ordered_json settings{{"checkpoint", f.checkpoint}, {"corpus", f.corpus},
                        {"baseline", f.baseline},     {"breakdown", f.breakdown},
                        {"strict_only", f.strict_only}, {"table3", f.table3},
                        {"seed", seed}};
  std::vector<std::string> inputs{f.corpus};
  if (!f.checkpoint.empty()) inputs.push_back(f.checkpoint);
  write_manifest(dir, "evaluate", config_hash(settings.dump()), seed, inputs, started);
  out << table;
  return kExitOk;
}

int cmd_predict(const Globals& g, const std::string& checkpoint, const std::string& corpus,
                std::ostream& out) {
  const std::string started = utc_now();
  require_file(checkpoint, "checkpoint");
  const Corpus gold = load_gold(corpus);
  const auto model = load_checkpoint(checkpoint);
  const PredictionSet predictions = model->predict(gold);
  const fs::path dir = output_dir(g, "runs/predict");
  save_predictions(predictions, dir / "predictions.jsonl");
  ordered_json settings{{"checkpoint", checkpoint}, {"corpus", corpus}};
  write_manifest(dir, "predict", config_hash(settings.dump()), std::nullopt, {corpus, checkpoint},
                 started);
  out << predictions.size() << " anaphors -> " << (dir / "predictions.jsonl").string() << "\n";
  return kExitOk;
}

int cmd_build_aux(const Globals& g, const std::string& kind_text, const std::string& input,
                  const std::string& gold_path, std::ostream& out) {
  const std::string started = utc_now();
  AuxSource kind;
  try {
    kind = parse_aux_source(kind_text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  require_file(input, "input corpus");
  ValidationOptions tolerant;
  tolerant.min_antecedents = 1;
  const Corpus src = load_corpus(input, tolerant);

  AuxCorpus aux;
  try {
    aux = build_aux(kind, src);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("cannot build ") + std::string(to_string(kind)) + ": " + e.what());
  }

  const fs::path dir = output_dir(g, "runs/aux");
  save_corpus(aux.corpus, dir / "aux.jsonl");

  std::size_t anaphors = 0;
  for (const auto& d : aux.corpus.documents) anaphors += d.split_anaphors.size();
  ordered_json summary;
  summary["kind"] = std::string(to_string(kind));
  summary["documents"] = aux.corpus.documents.size();
  summary["anaphors"] = anaphors;
  summary["link_count"] = aux.link_count;

  std::vector<std::string> inputs{input};
  if (!gold_path.empty()) {
    const Corpus gold = load_gold(gold_path);
    // Only documents present in the gold corpus are compared.
    std::set<std::string> ids;
    for (const auto& d : gold.documents) ids.insert(d.doc_id);
    Corpus shared;
    for (const auto& d : aux.corpus.documents) {
      if (ids.count(d.doc_id)) shared.documents.push_back(d);
    }
    const LinkQuality q = corpus_quality(shared, gold);
    summary["quality"] = ordered_json::parse(quality_to_json(q));
    summary["quality"]["compared_documents"] = shared.documents.size();
    inputs.push_back(gold_path);
    char line[160];
    std::snprintf(line, sizeof(line), "quality vs gold: R %.1f P %.1f F1 %.1f\n", 100 * q.recall,
                  100 * q.precision, 100 * q.f1);
    out << line;
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  ordered_json settings{{"kind", to_string(kind)}, {"input", input}, {"gold", gold_path}};
  write_manifest(dir, "build-aux", config_hash(settings.dump()), std::nullopt, inputs, started);
  out << to_string(kind) << ": " << aux.corpus.documents.size() << " documents, " << anaphors
      << " anaphors, " << aux.link_count << " links\n";
  return kExitOk;
}

int cmd_gen_synth(const Globals& g, bool show_stats, std::ostream& out) {
  const std::string started = utc_now();
  SyntheticConfig config;
  std::vector<std::string> inputs;
  if (!g.config.empty()) {
    require_file(g.config, "config file");
    try {
      config = synthetic_config_from_json(read_file(g.config));
    } catch (const std::exception& e) {
      throw UsageError("invalid config " + g.config + ": " + e.what());
    }
    inputs.push_back(g.config);
  }
  if (g.seed) config.seed = *g.seed;

  Corpus corpus;
  try {
    corpus = generate_synthetic(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = output_dir(g, "runs/synth");
  save_corpus(corpus, dir / "corpus.jsonl");
  const CorpusStats stats = compute_stats(corpus);
  write_file(dir / "stats.json", stats_to_json(stats) + "\n");
  const std::string canonical = synthetic_config_to_json(config);
  write_file(dir / "config.json", canonical + "\n");
  write_manifest(dir, "gen-synth", config_hash(canonical), config.seed, inputs, started);
  if (show_stats) out << stats_to_text(stats);
  out << corpus.documents.size() << " documents -> " << (dir / "corpus.jsonl").string() << "\n";
  return kExitOk;
}

int cmd_stats(const Globals& g, const std::string& corpus_path, bool as_json, bool aux,
              std::ostream& out) {
  const std::string started = utc_now();
  require_file(corpus_path, "corpus");
  ValidationOptions options;
  if (aux) options.min_antecedents = 1;
  const CorpusStats stats = compute_stats(load_corpus(corpus_path, options));
  out << (as_json ? stats_to_json(stats) + "\n" : stats_to_text(stats));
  if (!g.out.empty()) {
    const fs::path dir = output_dir(g, g.out);
    write_file(dir / "stats.json", stats_to_json(stats) + "\n");
    ordered_json settings{{"corpus", corpus_path}, {"aux", aux}};
    write_manifest(dir, "stats", config_hash(settings.dump()), std::nullopt, {corpus_path}, started);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Split-antecedent anaphora resolution", "splitres"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Random seed (overrides the config)");
  app.add_option("--config", g.config, "Configuration file (JSON)");
  app.add_option("--out", g.out, "Output directory");

  auto* train_cmd = app.add_subcommand("train", "Train a model from a config file");
  train_cmd->fallthrough();

  EvalFlags ef;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint or baseline on a gold corpus");
  eval_cmd->fallthrough();
  eval_cmd->add_option("--checkpoint", ef.checkpoint, "Model checkpoint");
  eval_cmd->add_option("--corpus", ef.corpus, "Gold corpus (JSONL)")->required();
  eval_cmd->add_option("--baseline", ef.baseline, "recent-2..recent-5 or random");
  eval_cmd->add_flag("--breakdown", ef.breakdown, "Add per-antecedent-count rows");
  eval_cmd->add_flag("--strict-only", ef.strict_only, "Report strict accuracy only");
  eval_cmd->add_flag("--table3", ef.table3, "All baselines plus the checkpoint in one table");

  std::string pred_ckpt, pred_corpus;
  auto* pred_cmd = app.add_subcommand("predict", "Write antecedent predictions");
  pred_cmd->fallthrough();
  pred_cmd->add_option("--checkpoint", pred_ckpt, "Model checkpoint")->required();
  pred_cmd->add_option("--corpus", pred_corpus, "Corpus with gold anaphors (JSONL)")->required();

  std::string aux_kind, aux_input, aux_gold;
  auto* aux_cmd = app.add_subcommand("build-aux", "Build an auxiliary training corpus");
  aux_cmd->fallthrough();
  aux_cmd->add_option("--kind", aux_kind, "silver | crowd | element-of | single-coref")->required();
  aux_cmd->add_option("--input", aux_input, "Source corpus (JSONL)")->required();
  aux_cmd->add_option("--gold", aux_gold, "Gold corpus for a quality report");

  bool synth_stats = false;
  auto* synth_cmd = app.add_subcommand("gen-synth", "Generate a synthetic corpus");
  synth_cmd->fallthrough();
  synth_cmd->add_flag("--stats", synth_stats, "Print corpus statistics");

  std::string stats_corpus;
  bool stats_json = false, stats_aux = false;
  auto* stats_cmd = app.add_subcommand("stats", "Print corpus statistics");
  stats_cmd->fallthrough();
  stats_cmd->add_option("--corpus", stats_corpus, "Corpus (JSONL)")->required();
  stats_cmd->add_flag("--json", stats_json, "JSON output");
  stats_cmd->add_flag("--aux", stats_aux, "Allow one-antecedent items");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (*train_cmd) return cmd_train(g, out);
    if (*eval_cmd) return cmd_evaluate(g, ef, out);
    if (*pred_cmd) return cmd_predict(g, pred_ckpt, pred_corpus, out);
    if (*aux_cmd) return cmd_build_aux(g, aux_kind, aux_input, aux_gold, out);
    if (*synth_cmd) return cmd_gen_synth(g, synth_stats, out);
    if (*stats_cmd) return cmd_stats(g, stats_corpus, stats_json, stats_aux, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace splitres::cli
