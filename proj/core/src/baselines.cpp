#include "splitres/baselines.hpp"

#include <set>
#include <stdexcept>

#include "splitres/hash.hpp"
#include "splitres/rng.hpp"
#include "splitres/scorer.hpp"

namespace splitres {

PredictionSet baseline_recent_m(const Document& doc, std::size_t m) {
  if (m < 2 || m > 5) {
    throw std::invalid_argument("recent-m baseline needs 2 <= m <= 5, got " + std::to_string(m));
  }
  PredictionSet out;
  DocumentIndex index(doc);
  for (const auto& split : doc.split_anaphors) {
    AnaphorPrediction p{doc.doc_id, split.anaphor, {}, {}};
    std::set<int> used;
    const std::size_t anaphor = index.index_of(split.anaphor);
    for (std::size_t c : candidate_antecedents(index, anaphor, index.mention_count())) {
      if (!used.insert(index.cluster(c)).second) continue;
      p.antecedents.push_back(doc.mentions[c].id);
      if (p.antecedents.size() == m) break;
    }
    out.push_back(std::move(p));
  }
  return out;
}

PredictionSet baseline_recent_m(const Corpus& corpus, std::size_t m) {
  PredictionSet out;
  for (const auto& doc : corpus.documents) {
    auto p = baseline_recent_m(doc, m);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

PredictionSet baseline_random(const Document& doc, std::uint64_t seed, std::size_t window) {
  PredictionSet out;
  DocumentIndex index(doc);
  GoldClusterMap clusters(doc);
  Rng rng(mix_seed(seed, doc.doc_id));
  for (const auto& split : doc.split_anaphors) {
    std::vector<PairScore> scores;
    for (std::size_t c : candidate_antecedents(index, index.index_of(split.anaphor), window)) {
      const double s = rng.uniform();
      scores.push_back({split.anaphor, doc.mentions[c].id, 0.0, s});
    }
    AnaphorPrediction p{doc.doc_id, split.anaphor, select_antecedents(scores, clusters), {}};
    for (const auto& id : p.antecedents) {
      for (const auto& s : scores) {
        if (s.candidate == id) p.scores.push_back(s.prob);
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

PredictionSet baseline_random(const Corpus& corpus, std::uint64_t seed, std::size_t window) {
  PredictionSet out;
  for (const auto& doc : corpus.documents) {
    auto p = baseline_random(doc, seed, window);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

}  // namespace splitres
