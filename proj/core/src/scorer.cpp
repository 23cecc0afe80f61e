#include "splitres/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "splitres/encoder.hpp"

namespace splitres {

PairRepr pair_repr(const Vector& antecedent, const Vector& anaphor, std::size_t mention_distance,
                   const Matrix& distance_table) {
  if (antecedent.size() != anaphor.size()) {
    throw std::invalid_argument("pair_repr: mention dimensions differ");
  }
  PairRepr p;
  p.distance_bucket = distance_bucket(mention_distance);
  p.vector.resize(3 * antecedent.size() + distance_table.cols());
  p.vector << antecedent, anaphor, antecedent.cwiseProduct(anaphor),
      distance_table.row(static_cast<Eigen::Index>(p.distance_bucket)).transpose();
  return p;
}

double pair_prob(double logit) {
  if (logit >= 0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

PairScorer::PairScorer(ParameterStore& store, Eigen::Index input_dim, Eigen::Index hidden_dim,
                       std::size_t hidden_layers, Rng& rng)
    : input_dim_(input_dim) {
  Eigen::Index in = input_dim;
  for (std::size_t l = 0; l <= hidden_layers; ++l) {
    const bool output = l == hidden_layers;
    const Eigen::Index out = output ? 1 : hidden_dim;
    const std::string name = output ? "scorer.out" : "scorer.hidden" + std::to_string(l);
    weights_.push_back(&store.add(name + ".w", in, out));
    biases_.push_back(&store.add(name + ".b", 1, out));
    init_glorot(*weights_.back(), rng);
    in = out;
  }
}

Vector PairScorer::logits(const Matrix& pairs, Tape* tape) const {
  if (pairs.cols() != input_dim_) {
    throw std::invalid_argument("pair scorer expects " + std::to_string(input_dim_) +
                                " inputs, got " + std::to_string(pairs.cols()));
  }
  Matrix act = pairs;
  if (tape) {
    tape->activations.clear();
    tape->activations.push_back(pairs);
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix next = act * weights_[l]->value;
    next.rowwise() += biases_[l]->value.row(0);
    if (l + 1 < weights_.size()) {
      next = next.cwiseMax(0.0);
      if (tape) tape->activations.push_back(next);
    }
    act = std::move(next);
  }
  if (!act.allFinite()) throw std::runtime_error("pair scorer produced non-finite activations");
  return act.col(0);
}

double PairScorer::logit(const Vector& pair) const {
  return logits(pair.transpose())(0);
}

Matrix PairScorer::backward(const Tape& tape, const Vector& d_logits) {
  Matrix grad = d_logits;  // rows x 1
  for (std::size_t l = weights_.size(); l-- > 0;) {
    const Matrix& input = tape.activations[l];
    weights_[l]->grad += input.transpose() * grad;
    biases_[l]->grad.row(0) += grad.colwise().sum();
    Matrix d_input = grad * weights_[l]->value.transpose();
    if (l > 0) d_input = d_input.cwiseProduct((input.array() > 0.0).cast<double>().matrix());
    grad = std::move(d_input);
  }
  return grad;
}

GoldClusterMap::GoldClusterMap(const Document& doc) {
  for (std::size_t c = 0; c < doc.clusters.size(); ++c) {
    for (const auto& id : doc.clusters[c]) clusters_.emplace(id, static_cast<int>(c));
  }
}

int GoldClusterMap::cluster(std::string_view mention) const {
  auto it = clusters_.find(std::string(mention));
  if (it == clusters_.end()) {
    throw std::out_of_range("no gold cluster for mention " + std::string(mention));
  }
  return it->second;
}

bool GoldClusterMap::contains(std::string_view mention) const {
  return clusters_.find(std::string(mention)) != clusters_.end();
}

std::vector<bool> correct_candidates(const CandidateSet& candidates, const GoldClusterMap& gold,
                                     std::span<const std::string> gold_antecedents) {
  std::set<int> gold_clusters;
  for (const auto& a : gold_antecedents) gold_clusters.insert(gold.cluster(a));
  std::vector<bool> out;
  out.reserve(candidates.candidates.size());
  for (const auto& c : candidates.candidates) out.push_back(gold_clusters.count(gold.cluster(c)) > 0);
  return out;
}

LossResult marginal_loss(const Vector& logits, double epsilon_logit,
                         const std::vector<bool>& correct) {
  if (static_cast<std::size_t>(logits.size()) != correct.size()) {
    throw std::invalid_argument("marginal_loss: logits and correctness flags differ in length");
  }
  const bool any_correct = std::find(correct.begin(), correct.end(), true) != correct.end();

  double peak = epsilon_logit;
  for (Eigen::Index k = 0; k < logits.size(); ++k) peak = std::max(peak, logits(k));

  // softmax over candidates and epsilon, and its restriction to the gold set
  Vector p(logits.size());
  double z_all = std::exp(epsilon_logit - peak);
  double z_gold = any_correct ? 0.0 : z_all;
  for (Eigen::Index k = 0; k < logits.size(); ++k) {
    p(k) = std::exp(logits(k) - peak);
    z_all += p(k);
    if (correct[static_cast<std::size_t>(k)]) z_gold += p(k);
  }

  LossResult r;
  r.loss = std::log(z_all) - std::log(z_gold);
  r.d_logits.resize(logits.size());
  for (Eigen::Index k = 0; k < logits.size(); ++k) {
    const double all = p(k) / z_all;
    const double gold = correct[static_cast<std::size_t>(k)] ? p(k) / z_gold : 0.0;
    r.d_logits(k) = all - gold;
  }
  const double eps = std::exp(epsilon_logit - peak);
  r.d_epsilon = eps / z_all - (any_correct ? 0.0 : eps / z_gold);
  return r;
}

LossResult marginal_loss(const CandidateSet& candidates, const GoldClusterMap& gold,
                         std::span<const std::string> gold_antecedents, const Vector& logits,
                         double epsilon_logit) {
  return marginal_loss(logits, epsilon_logit,
                       correct_candidates(candidates, gold, gold_antecedents));
}

std::vector<std::string> select_antecedents(std::span<const PairScore> scores,
                                            const GoldClusterMap& clusters) {
  std::vector<std::size_t> ranking(scores.size());
  std::iota(ranking.begin(), ranking.end(), std::size_t{0});
  std::stable_sort(ranking.begin(), ranking.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].prob > scores[b].prob; });

  std::vector<std::string> selected;
  std::set<int> used;
  for (std::size_t k : ranking) {
    if (selected.size() == kMaxSelected) break;
    if (!(scores[k].prob > kSelectThreshold)) break;
    if (used.insert(clusters.cluster(scores[k].candidate)).second) {
      selected.push_back(scores[k].candidate);
    }
  }
  if (selected.size() >= kMinSelected) return selected;

  selected.clear();
  used.clear();
  for (std::size_t k : ranking) {
    if (used.insert(clusters.cluster(scores[k].candidate)).second) {
      selected.push_back(scores[k].candidate);
      if (selected.size() == kMinSelected) return selected;
    }
  }
  const std::string anaphor = scores.empty() ? std::string("<none>") : scores.front().anaphor;
  throw std::invalid_argument("select_antecedents: anaphor " + anaphor +
                              " has fewer than 2 cluster-distinct candidates");
}

}  // namespace splitres
