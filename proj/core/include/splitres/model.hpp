#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "splitres/corpus.hpp"
#include "splitres/embeddings.hpp"
#include "splitres/encoder.hpp"
#include "splitres/model_config.hpp"
#include "splitres/params.hpp"
#include "splitres/prediction.hpp"
#include "splitres/scorer.hpp"

namespace splitres {

// Pairwise split-antecedent ranker: mention encoder + pair scorer. The dummy
// antecedent has a fixed logit of zero, so pair probability 0.5 is the point
// where a candidate outscores it.
class CorefModel {
 public:
  CorefModel(ModelConfig config, Vocabulary vocab, std::uint64_t seed);
  // For tests: custom embedding providers.
  CorefModel(ModelConfig config, std::vector<std::unique_ptr<EmbeddingProvider>> providers,
             std::uint64_t seed);

  CorefModel(const CorefModel&) = delete;
  CorefModel& operator=(const CorefModel&) = delete;

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  const MentionEncoder& encoder() const { return *encoder_; }
  const PairScorer& scorer() const { return *scorer_; }
  const Matrix& distance_table() const { return distance_->value; }

  // Training objective for one document: the sum of marginal losses over
  // every mention with at least one candidate (or over split anaphors only,
  // see ModelConfig::train_all_mentions).
  double loss(const Document& doc) const;
  // Same value; also accumulates parameter gradients.
  double accumulate_gradients(const Document& doc);

  // Candidate scores for one anaphor, nearest candidate first.
  std::vector<PairScore> score_candidates(const Document& doc, std::string_view anaphor) const;

  // Predictions for every gold split anaphor of the document.
  PredictionSet predict(const Document& doc) const;
  PredictionSet predict(const Corpus& corpus) const;

 private:
  struct Backprop;
  double objective(const Document& doc, Backprop* backprop) const;
  void build(std::uint64_t seed, std::vector<std::unique_ptr<EmbeddingProvider>>* providers);

  ModelConfig config_;
  Vocabulary vocab_;
  ParameterStore params_;
  std::unique_ptr<MentionEncoder> encoder_;
  std::unique_ptr<PairScorer> scorer_;
  Parameter* distance_ = nullptr;
};

}  // namespace splitres
