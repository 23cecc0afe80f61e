#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splitres/corpus.hpp"

namespace splitres {

enum class AuxSource { kPdSilver, kPdCrowd, kElementOf, kSingleCoref };

std::string_view to_string(AuxSource source);
// Accepts "silver", "crowd", "element-of", "single-coref" and the pd- forms.
AuxSource parse_aux_source(std::string_view text);

struct AuxCorpus {
  Corpus corpus;
  AuxSource source = AuxSource::kPdSilver;
  std::size_t link_count = 0;
};

// Documents with at least one split anaphor; bridging and crowd layers are
// dropped.
AuxCorpus build_silver(const Corpus& pd);

// Whole-set majority vote over annotations of one anaphor. Ties go to the set
// with the larger per-link vote total, then to the set holding the earliest
// mention (document order) on which the tied sets differ. The result is one
// of the input sets, with its ids in document order.
std::vector<std::string> majority_vote(std::span<const CrowdAnnotation> annotations,
                                       const DocumentIndex& index);

// Aggregates crowd split-antecedent annotations (two or more antecedents)
// per anaphor by majority vote. Throws std::invalid_argument when no
// document carries crowd annotations.
AuxCorpus build_crowd(const Corpus& pd_raw);

// element-of (singular anaphor -> plural antecedent) and element-of-inverse
// (plural anaphor -> singular antecedent) links become training links,
// grouped per anaphor. Throws std::invalid_argument when no document carries
// bridging links.
AuxCorpus build_element_of(const Corpus& src);

// Every non-first mention of a cluster links to its nearest preceding
// cluster-mate.
AuxCorpus build_single_coref(const Corpus& src);

AuxCorpus build_aux(AuxSource source, const Corpus& src);

struct LinkQuality {
  double recall = 0;
  double precision = 0;
  double f1 = 0;
  std::size_t aux_links = 0;
  std::size_t gold_links = 0;
  std::size_t matched_links = 0;
};

// Link-level agreement where a link is (document, anaphor, gold cluster of
// the antecedent). Throws std::invalid_argument if `aux` references a
// document or mention missing from `gold`.
LinkQuality corpus_quality(const Corpus& aux, const Corpus& gold);
inline LinkQuality corpus_quality(const AuxCorpus& aux, const Corpus& gold) {
  return corpus_quality(aux.corpus, gold);
}

std::string quality_to_json(const LinkQuality& quality);

}  // namespace splitres
