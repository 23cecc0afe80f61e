#pragma once

#include <cstddef>
#include <cstdint>

#include "splitres/corpus.hpp"
#include "splitres/prediction.hpp"

namespace splitres {

// The m nearest preceding mentions from distinct gold clusters, for every
// gold split anaphor. Throws std::invalid_argument unless 2 <= m <= 5.
PredictionSet baseline_recent_m(const Document& doc, std::size_t m);
PredictionSet baseline_recent_m(const Corpus& corpus, std::size_t m);

// Independent uniform scores for every candidate, then the standard
// selection rule. Each document draws from its own stream derived from
// (seed, doc_id).
PredictionSet baseline_random(const Document& doc, std::uint64_t seed,
                              std::size_t window = kDefaultCandidateWindow);
PredictionSet baseline_random(const Corpus& corpus, std::uint64_t seed,
                              std::size_t window = kDefaultCandidateWindow);

}  // namespace splitres
