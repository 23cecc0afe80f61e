#include <gtest/gtest.h>

#include <algorithm>

#include "builders.hpp"
#include "oracles.hpp"
#include "splitres/aux_builders.hpp"
#include "splitres/synthetic.hpp"

namespace splitres {
namespace {

using testing::add_split;
using testing::chain_document;

CrowdAnnotation ann(const std::string& who, const std::string& anaphor,
                    std::vector<std::string> antecedents) {
  return {who, anaphor, std::move(antecedents)};
}

// A=m0, B=m1, C=m2 in distinct clusters, anaphor m3.
Document abc_doc() { return chain_document("d", {0, 1, 2, 3}); }

TEST(BuildSilver, NoSplitAnaphorsGivesEmptyCorpus) {
  Corpus c;
  c.documents.push_back(chain_document("d", {0, 1, 2}));
  const AuxCorpus aux = build_silver(c);
  EXPECT_TRUE(aux.corpus.documents.empty());
  EXPECT_EQ(aux.link_count, 0u);
  EXPECT_EQ(aux.source, AuxSource::kPdSilver);
}

TEST(BuildSilver, KeepsDocumentsWithAnaphorsAndDropsOtherLayers) {
  Corpus c;
  Document with = abc_doc();
  add_split(with, "m3", {"m0", "m1"});
  with.crowd.push_back(ann("u", "m3", {"m0", "m2"}));
  with.bridging.push_back({"m3", "m0", BridgingRelation::kOther});
  c.documents = {chain_document("e", {0, 1}), with};
  const AuxCorpus aux = build_silver(c);
  ASSERT_EQ(aux.corpus.documents.size(), 1u);
  EXPECT_EQ(aux.corpus.documents[0].doc_id, "d");
  EXPECT_TRUE(aux.corpus.documents[0].crowd.empty());
  EXPECT_TRUE(aux.corpus.documents[0].bridging.empty());
  EXPECT_EQ(aux.corpus.quality_tier, QualityTier::kSilver);
  EXPECT_EQ(aux.link_count, 2u);
}

TEST(MajorityVote, Unanimity) {
  const Document doc = abc_doc();
  const std::vector<CrowdAnnotation> anns = {ann("u1", "m3", {"m1", "m0"})};
  EXPECT_EQ(majority_vote(anns, DocumentIndex(doc)), (std::vector<std::string>{"m0", "m1"}));
}

TEST(MajorityVote, PluralityWins) {
  const Document doc = abc_doc();
  const std::vector<CrowdAnnotation> anns = {ann("u1", "m3", {"m0", "m1"}),
                                             ann("u2", "m3", {"m0", "m1"}),
                                             ann("u3", "m3", {"m0", "m2"})};
  EXPECT_EQ(majority_vote(anns, DocumentIndex(doc)), (std::vector<std::string>{"m0", "m1"}));
}

TEST(MajorityVote, TieGoesToHigherLinkTotal) {
  // One vote each; m2 appears twice, so {m1,m2} and {m2,m4} total 3 link
  // votes against 2 for {m0,m3}. The earlier m1 then decides.
  const Document doc = chain_document("d", {0, 1, 2, 3, 4, 5});
  const std::vector<CrowdAnnotation> anns = {ann("u1", "m5", {"m0", "m3"}),
                                             ann("u2", "m5", {"m2", "m4"}),
                                             ann("u3", "m5", {"m1", "m2"})};
  EXPECT_EQ(majority_vote(anns, DocumentIndex(doc)), (std::vector<std::string>{"m1", "m2"}));
}

TEST(MajorityVote, FullTieGoesToEarliestDistinguishingMention) {
  const Document doc = abc_doc();
  const std::vector<CrowdAnnotation> anns = {ann("u1", "m3", {"m0", "m2"}),
                                             ann("u2", "m3", {"m0", "m1"})};
  EXPECT_EQ(majority_vote(anns, DocumentIndex(doc)), (std::vector<std::string>{"m0", "m1"}));
}

TEST(MajorityVote, EmptyInputThrows) {
  const Document doc = abc_doc();
  EXPECT_THROW(majority_vote({}, DocumentIndex(doc)), std::invalid_argument);
}

TEST(MajorityVote, PermutationInvariantAndOneOfTheInputs) {
  const Document doc = chain_document("d", {0, 1, 2, 3, 4});
  std::vector<CrowdAnnotation> anns = {ann("a", "m4", {"m0", "m3"}), ann("b", "m4", {"m1", "m2"}),
                                       ann("c", "m4", {"m0", "m2"}),
                                       ann("d", "m4", {"m1", "m2", "m3"})};
  const DocumentIndex index(doc);
  const auto reference = majority_vote(anns, index);
  std::sort(anns.begin(), anns.end(),
            [](const auto& x, const auto& y) { return x.annotator < y.annotator; });
  do {
    EXPECT_EQ(majority_vote(anns, index), reference);
  } while (std::next_permutation(anns.begin(), anns.end(), [](const auto& x, const auto& y) {
    return x.annotator < y.annotator;
  }));
  bool is_input = false;
  for (const auto& a : anns) {
    auto s = a.antecedents;
    std::sort(s.begin(), s.end());
    is_input = is_input || s == reference;
  }
  EXPECT_TRUE(is_input);
}

TEST(BuildCrowd, MissingLayerThrows) {
  Corpus c;
  c.name = "pd";
  c.documents.push_back(abc_doc());
  EXPECT_THROW(build_crowd(c), std::invalid_argument);
}

TEST(BuildCrowd, AggregatesPerAnaphor) {
  Corpus c;
  Document doc = abc_doc();
  doc.crowd = {ann("u1", "m3", {"m0", "m1"}), ann("u2", "m3", {"m0", "m1"}),
               ann("u3", "m3", {"m1", "m2"}), ann("u4", "m2", {"m0"})};
  c.documents.push_back(doc);
  const AuxCorpus aux = build_crowd(c);
  ASSERT_EQ(aux.corpus.documents.size(), 1u);
  ASSERT_EQ(aux.corpus.documents[0].split_anaphors.size(), 1u);
  EXPECT_EQ(aux.corpus.documents[0].split_anaphors[0], (SplitAnaphor{"m3", {"m0", "m1"}}));
  EXPECT_EQ(aux.corpus.quality_tier, QualityTier::kNoisy);
}

TEST(BuildCrowd, LinkCountAtLeastSilverWhenSilverIsAmongRawLabels) {
  SyntheticConfig config;
  config.crowd_annotators = 3;
  config.crowd_accuracy = 0.6;
  const Corpus pd = generate_synthetic(config);
  EXPECT_GE(build_crowd(pd).link_count, build_silver(pd).link_count);
}

TEST(BuildElementOf, MissingLayerThrows) {
  Corpus c;
  c.documents.push_back(abc_doc());
  EXPECT_THROW(build_element_of(c), std::invalid_argument);
}

TEST(BuildElementOf, BothDirectionsKeepAnaphorToAntecedent) {
  // m0 plural set, m2 singular member: element-of m2 -> m0.
  // m1 singular, m3 plural containing it: element-of-inverse m3 -> m1.
  Corpus c;
  Document doc = abc_doc();
  doc.bridging = {{"m2", "m0", BridgingRelation::kElementOf},
                  {"m3", "m1", BridgingRelation::kElementOfInverse},
                  {"m3", "m0", BridgingRelation::kOther}};
  c.documents.push_back(doc);
  const AuxCorpus aux = build_element_of(c);
  ASSERT_EQ(aux.corpus.documents.size(), 1u);
  const auto& splits = aux.corpus.documents[0].split_anaphors;
  ASSERT_EQ(splits.size(), 2u);
  EXPECT_EQ(splits[0], (SplitAnaphor{"m2", {"m0"}}));
  EXPECT_EQ(splits[1], (SplitAnaphor{"m3", {"m1"}}));
  EXPECT_EQ(aux.link_count, 2u);
  EXPECT_EQ(aux.corpus.quality_tier, QualityTier::kGold);
}

TEST(BuildSingleCoref, AllSingletonsGiveNoLinks) {
  Corpus c;
  c.documents.push_back(abc_doc());
  EXPECT_EQ(build_single_coref(c).link_count, 0u);
}

TEST(BuildSingleCoref, NearestPredecessorLinks) {
  Corpus c;
  c.documents.push_back(chain_document("d", {7, 1, 7, 7}));
  const AuxCorpus aux = build_single_coref(c);
  ASSERT_EQ(aux.corpus.documents.size(), 1u);
  const auto& splits = aux.corpus.documents[0].split_anaphors;
  ASSERT_EQ(splits.size(), 2u);
  EXPECT_EQ(splits[0], (SplitAnaphor{"m2", {"m0"}}));
  EXPECT_EQ(splits[1], (SplitAnaphor{"m3", {"m2"}}));
}

TEST(BuildSingleCoref, ClusterSizeMinusOneLinksPerCluster) {
  const Corpus src = generate_synthetic({});
  std::size_t expected = 0;
  for (const auto& doc : src.documents) {
    for (const auto& cluster : doc.clusters) expected += cluster.size() - 1;
  }
  EXPECT_EQ(build_single_coref(src).link_count, expected);
}

TEST(CorpusQuality, IdenticalCorporaScorePerfect) {
  const Corpus gold = generate_synthetic({});
  const LinkQuality q = corpus_quality(build_silver(gold), gold);
  EXPECT_DOUBLE_EQ(q.recall, 1.0);
  EXPECT_DOUBLE_EQ(q.precision, 1.0);
  EXPECT_DOUBLE_EQ(q.f1, 1.0);
}

TEST(CorpusQuality, HalfRightHalfWrong) {
  Document g = abc_doc();
  add_split(g, "m3", {"m0", "m1"});
  Document a = abc_doc();
  add_split(a, "m3", {"m0", "m2"});
  Corpus gold, aux;
  gold.documents.push_back(g);
  aux.documents.push_back(a);
  const LinkQuality q = corpus_quality(aux, gold);
  EXPECT_DOUBLE_EQ(q.recall, 0.5);
  EXPECT_DOUBLE_EQ(q.precision, 0.5);
  EXPECT_DOUBLE_EQ(q.f1, 0.5);
}

TEST(CorpusQuality, LinksMatchByCluster) {
  Document g = chain_document("d", {0, 0, 1, 2});
  add_split(g, "m3", {"m0", "m2"});
  Document a = g;
  a.split_anaphors[0].antecedents = {"m1", "m2"};
  Corpus gold, aux;
  gold.documents.push_back(g);
  aux.documents.push_back(a);
  EXPECT_DOUBLE_EQ(corpus_quality(aux, gold).f1, 1.0);
}

TEST(CorpusQuality, UnknownDocumentThrows) {
  Corpus gold, aux;
  gold.documents.push_back(abc_doc());
  aux.documents.push_back(chain_document("other", {0, 1}));
  EXPECT_THROW(corpus_quality(aux, gold), std::invalid_argument);
}

TEST(CorpusQuality, JsonReport) {
  LinkQuality q;
  q.recall = 0.5;
  q.gold_links = 2;
  const std::string json = quality_to_json(q);
  for (const char* key : {"recall", "precision", "f1", "link_counts"}) {
    EXPECT_NE(json.find(key), std::string::npos);
  }
}

TEST(ParseAuxSource, KnownAndUnknownKinds) {
  EXPECT_EQ(parse_aux_source("crowd"), AuxSource::kPdCrowd);
  EXPECT_EQ(parse_aux_source("single-coref"), AuxSource::kSingleCoref);
  EXPECT_THROW(parse_aux_source("gold"), std::invalid_argument);
}

}  // namespace
}  // namespace splitres
