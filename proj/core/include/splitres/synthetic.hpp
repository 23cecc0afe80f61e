#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "splitres/corpus.hpp"

namespace splitres {

// Generator settings for test corpora.
//
// Documents are sequences of filler tokens with non-overlapping mentions.
// Entity mentions look like `[the] <head> <slot>`; coreferent mentions share
// the head token. A split anaphor looks like `<cue> <marker>` and each of its
// antecedents carries the same marker token in its slot, which gives models a
// lexical signal they can learn (and overfit) from.
struct SyntheticConfig {
  std::size_t num_docs = 50;
  std::size_t tokens_per_doc = 120;
  // Mentions per token. Each mention takes at most 3 tokens.
  double mention_density = 0.2;
  // Probability that a mention is generated as a split anaphor.
  double split_anaphor_rate = 0.1;
  // Relative weights of antecedent counts 2, 3, 4, 5.
  std::array<double, 4> antecedent_count_weights = {0.8, 0.15, 0.05, 0.0};
  // Probability that a non-anaphor mention refers to an existing entity.
  double coref_rate = 0.3;
  // Probability that a new entity is a discourse-new plural `<cue> <marker>`
  // with a fresh marker and no antecedents (not a split anaphor).
  double plural_distractor_rate = 0.2;
  std::size_t filler_vocab = 200;
  std::size_t head_vocab = 100;
  std::size_t marker_count = 40;
  // Probability that a split anaphor also gets element-of-inverse bridging
  // links to its antecedents.
  double bridging_rate = 0.0;
  // Crowd annotations per split anaphor; each is correct with probability
  // `crowd_accuracy`, otherwise one antecedent is swapped for a distractor.
  std::size_t crowd_annotators = 0;
  double crowd_accuracy = 0.7;
  std::uint64_t seed = 1;
  std::string doc_prefix = "synth";
};

SyntheticConfig synthetic_config_from_json(std::string_view text);
std::string synthetic_config_to_json(const SyntheticConfig& config);

// Deterministic for a fixed config. Throws std::invalid_argument for
// infeasible configurations.
Corpus generate_synthetic(const SyntheticConfig& config);

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t tokens = 0;
  std::size_t mentions = 0;
  std::size_t clusters = 0;
  std::size_t non_singleton_clusters = 0;
  std::size_t split_anaphors = 0;
  std::size_t antecedent_links = 0;
  std::size_t bridging_links = 0;
  std::size_t crowd_annotations = 0;
  // antecedent count -> number of anaphors
  std::map<std::size_t, std::size_t> antecedent_histogram;
};

CorpusStats compute_stats(const Corpus& corpus);
std::string stats_to_json(const CorpusStats& stats);
std::string stats_to_text(const CorpusStats& stats);

}  // namespace splitres
