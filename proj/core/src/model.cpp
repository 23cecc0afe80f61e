#include "splitres/model.hpp"

#include <cmath>
#include <stdexcept>

namespace splitres {

struct CorefModel::Backprop {
  struct Position {
    std::size_t anaphor = 0;                // index into doc.mentions
    std::vector<std::size_t> candidates;    // indices into doc.mentions
    std::vector<std::size_t> buckets;       // distance bucket per candidate
    PairScorer::Tape tape;
    Vector d_logits;
  };
  MentionEncoder::Tape encoder;
  Matrix mentions;
  std::vector<Position> positions;
};

CorefModel::CorefModel(ModelConfig config, Vocabulary vocab, std::uint64_t seed)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  build(seed, nullptr);
}

CorefModel::CorefModel(ModelConfig config,
                       std::vector<std::unique_ptr<EmbeddingProvider>> providers,
                       std::uint64_t seed)
    : config_(std::move(config)) {
  build(seed, &providers);
}

void CorefModel::build(std::uint64_t seed,
                       std::vector<std::unique_ptr<EmbeddingProvider>>* providers) {
  Rng rng(seed);
  encoder_ = providers ? std::make_unique<MentionEncoder>(std::move(*providers), config_, params_, rng)
                       : std::make_unique<MentionEncoder>(config_, vocab_, params_, rng);
  distance_ = &params_.add("embed.distance", kBucketCount,
                           static_cast<Eigen::Index>(config_.distance_dim));
  init_uniform(*distance_, 0.1, rng);
  const auto m = static_cast<Eigen::Index>(encoder_->mention_dim());
  scorer_ = std::make_unique<PairScorer>(params_, 3 * m + static_cast<Eigen::Index>(config_.distance_dim),
                                         static_cast<Eigen::Index>(config_.ffnn_hidden),
                                         config_.ffnn_layers, rng);
}

namespace {

Matrix pair_matrix(const Matrix& mentions, std::size_t anaphor,
                   const std::vector<std::size_t>& candidates,
                   const std::vector<std::size_t>& buckets, const Matrix& distance) {
  const Eigen::Index m = mentions.cols();
  const Eigen::Index k = static_cast<Eigen::Index>(candidates.size());
  Matrix pairs(k, 3 * m + distance.cols());
  const auto ana = mentions.row(static_cast<Eigen::Index>(anaphor));
  for (Eigen::Index r = 0; r < k; ++r) {
    const auto cand = mentions.row(static_cast<Eigen::Index>(candidates[static_cast<std::size_t>(r)]));
    pairs.block(r, 0, 1, m) = cand;
    pairs.block(r, m, 1, m) = ana;
    pairs.block(r, 2 * m, 1, m) = cand.cwiseProduct(ana);
    pairs.block(r, 3 * m, 1, distance.cols()) =
        distance.row(static_cast<Eigen::Index>(buckets[static_cast<std::size_t>(r)]));
  }
  return pairs;
}

}  // namespace

double CorefModel::objective(const Document& doc, Backprop* bp) const {
  DocumentIndex index(doc);
  GoldClusterMap gold(doc);
  MentionEncoder::Tape local_tape;
  const Matrix mentions = encoder_->encode_mentions(doc, bp ? &bp->encoder : &local_tape);

  double total = 0;
  for (std::size_t anaphor : index.order()) {
    const SplitAnaphor* split = doc.find_split(doc.mentions[anaphor].id);
    if (!config_.train_all_mentions && split == nullptr) continue;
    auto candidates = candidate_antecedents(index, anaphor, config_.window);
    if (candidates.empty()) continue;

    std::vector<std::size_t> buckets;
    buckets.reserve(candidates.size());
    std::vector<bool> correct(candidates.size(), false);
    std::vector<int> gold_clusters;
    if (split) {
      for (const auto& a : split->antecedents) gold_clusters.push_back(index.cluster_of(a));
    }
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      buckets.push_back(distance_bucket(index.rank(anaphor) - index.rank(candidates[k])));
      const int c = index.cluster(candidates[k]);
      for (int g : gold_clusters) correct[k] = correct[k] || (c >= 0 && c == g);
    }

    const Matrix pairs = pair_matrix(mentions, anaphor, candidates, buckets, distance_->value);
    PairScorer::Tape tape;
    const Vector logits = scorer_->logits(pairs, bp ? &tape : nullptr);
    LossResult r = marginal_loss(logits, 0.0, correct);
    total += r.loss;
    if (bp) {
      bp->positions.push_back(
          {anaphor, std::move(candidates), std::move(buckets), std::move(tape), std::move(r.d_logits)});
    }
  }
  if (bp) bp->mentions = mentions;
  return total;
}

double CorefModel::loss(const Document& doc) const { return objective(doc, nullptr); }

double CorefModel::accumulate_gradients(const Document& doc) {
  Backprop bp;
  const double total = objective(doc, &bp);
  if (!std::isfinite(total)) return total;

  const Eigen::Index m = bp.mentions.cols();
  Matrix d_mentions = Matrix::Zero(bp.mentions.rows(), m);
  for (auto& pos : bp.positions) {
    const Matrix d_pairs = scorer_->backward(pos.tape, pos.d_logits);
    const auto ana_row = static_cast<Eigen::Index>(pos.anaphor);
    const auto ana = bp.mentions.row(ana_row);
    for (std::size_t k = 0; k < pos.candidates.size(); ++k) {
      const auto r = static_cast<Eigen::Index>(k);
      const auto cand_row = static_cast<Eigen::Index>(pos.candidates[k]);
      const auto prod = d_pairs.block(r, 2 * m, 1, m);
      d_mentions.row(cand_row) += d_pairs.block(r, 0, 1, m) + prod.cwiseProduct(ana);
      d_mentions.row(ana_row) +=
          d_pairs.block(r, m, 1, m) + prod.cwiseProduct(bp.mentions.row(cand_row));
      distance_->grad.row(static_cast<Eigen::Index>(pos.buckets[k])) +=
          d_pairs.block(r, 3 * m, 1, distance_->value.cols());
    }
  }
  encoder_->backward(doc, bp.encoder, d_mentions);
  return total;
}

std::vector<PairScore> CorefModel::score_candidates(const Document& doc,
                                                    std::string_view anaphor) const {
  DocumentIndex index(doc);
  const std::size_t a = index.index_of(anaphor);
  const auto candidates = candidate_antecedents(index, a, config_.window);
  std::vector<PairScore> out;
  if (candidates.empty()) return out;
  const Matrix mentions = encoder_->encode_mentions(doc);
  std::vector<std::size_t> buckets;
  for (std::size_t c : candidates) buckets.push_back(distance_bucket(index.rank(a) - index.rank(c)));
  const Vector logits =
      scorer_->logits(pair_matrix(mentions, a, candidates, buckets, distance_->value));
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double r = logits(static_cast<Eigen::Index>(k));
    out.push_back({std::string(anaphor), doc.mentions[candidates[k]].id, r, pair_prob(r)});
  }
  return out;
}

PredictionSet CorefModel::predict(const Document& doc) const {
  PredictionSet out;
  if (doc.split_anaphors.empty()) return out;
  DocumentIndex index(doc);
  GoldClusterMap clusters(doc);
  const Matrix mentions = encoder_->encode_mentions(doc);

  for (const auto& split : doc.split_anaphors) {
    const std::size_t a = index.index_of(split.anaphor);
    const auto candidates = candidate_antecedents(index, a, config_.window);
    std::vector<std::size_t> buckets;
    for (std::size_t c : candidates) buckets.push_back(distance_bucket(index.rank(a) - index.rank(c)));
    std::vector<PairScore> scores;
    if (!candidates.empty()) {
      const Vector logits =
          scorer_->logits(pair_matrix(mentions, a, candidates, buckets, distance_->value));
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        const double r = logits(static_cast<Eigen::Index>(k));
        scores.push_back({split.anaphor, doc.mentions[candidates[k]].id, r, pair_prob(r)});
      }
    }
    AnaphorPrediction p{doc.doc_id, split.anaphor, select_antecedents(scores, clusters), {}};
    for (const auto& id : p.antecedents) {
      for (const auto& s : scores) {
        if (s.candidate == id) {
          p.scores.push_back(s.prob);
          break;
        }
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

PredictionSet CorefModel::predict(const Corpus& corpus) const {
  PredictionSet out;
  for (const auto& doc : corpus.documents) {
    auto p = predict(doc);
    out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  }
  return out;
}

}  // namespace splitres
