#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "splitres/corpus.hpp"
#include "splitres/params.hpp"

namespace splitres {

struct PairRepr {
  Vector vector;  // [antecedent; anaphor; antecedent * anaphor; distance embedding]
  std::size_t distance_bucket = 0;
};

// `mention_distance` counts mentions from candidate to anaphor (>= 1).
PairRepr pair_repr(const Vector& antecedent, const Vector& anaphor, std::size_t mention_distance,
                   const Matrix& distance_table);

// Logistic link between logit and pair probability.
double pair_prob(double logit);

// Feed-forward pair scorer: rectified hidden layers and a scalar output.
class PairScorer {
 public:
  struct Tape {
    std::vector<Matrix> activations;  // input, then each hidden layer (post-ReLU)
  };

  PairScorer(ParameterStore& store, Eigen::Index input_dim, Eigen::Index hidden_dim,
             std::size_t hidden_layers, Rng& rng);

  Eigen::Index input_dim() const { return input_dim_; }

  // One logit per row of `pairs`. Throws std::runtime_error on non-finite
  // activations.
  Vector logits(const Matrix& pairs, Tape* tape = nullptr) const;
  double logit(const Vector& pair) const;

  // Returns d(loss)/d(pairs), accumulating parameter gradients.
  Matrix backward(const Tape& tape, const Vector& d_logits);

 private:
  Eigen::Index input_dim_;
  std::vector<Parameter*> weights_;
  std::vector<Parameter*> biases_;
};

struct PairScore {
  std::string anaphor;
  std::string candidate;
  double logit = 0;
  double prob = 0.5;
};

// mention id -> gold single-antecedent cluster.
class GoldClusterMap {
 public:
  GoldClusterMap() = default;
  explicit GoldClusterMap(const Document& doc);

  void assign(std::string mention, int cluster) { clusters_[std::move(mention)] = cluster; }
  // Throws std::out_of_range for unknown mentions.
  int cluster(std::string_view mention) const;
  bool contains(std::string_view mention) const;

 private:
  std::unordered_map<std::string, int> clusters_;
};

struct CandidateSet {
  std::string anaphor;
  std::vector<std::string> candidates;  // nearest first
  bool includes_epsilon = true;
};

// A candidate is correct iff it shares a gold cluster with one of the gold
// antecedents.
std::vector<bool> correct_candidates(const CandidateSet& candidates, const GoldClusterMap& gold,
                                     std::span<const std::string> gold_antecedents);

struct LossResult {
  double loss = 0;
  Vector d_logits;  // per candidate
  double d_epsilon = 0;
};

// -log of the softmax mass on the correct candidates, normalised over the
// candidates plus the dummy antecedent. With no correct candidate the dummy
// antecedent is the only correct one.
LossResult marginal_loss(const Vector& logits, double epsilon_logit,
                         const std::vector<bool>& correct);

LossResult marginal_loss(const CandidateSet& candidates, const GoldClusterMap& gold,
                         std::span<const std::string> gold_antecedents, const Vector& logits,
                         double epsilon_logit = 0.0);

inline constexpr std::size_t kMinSelected = 2;
inline constexpr std::size_t kMaxSelected = 5;
inline constexpr double kSelectThreshold = 0.5;

// Ranks candidates by probability, takes up to five with probability above
// 0.5 from distinct gold clusters, and falls back to the two best
// cluster-distinct candidates when fewer than two qualify. Throws
// std::invalid_argument when fewer than two cluster-distinct candidates
// exist.
std::vector<std::string> select_antecedents(std::span<const PairScore> scores,
                                            const GoldClusterMap& clusters);

}  // namespace splitres
