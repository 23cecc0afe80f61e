#include <gtest/gtest.h>

#include <algorithm>

#include "builders.hpp"
#include "oracles.hpp"
#include "splitres/corpus.hpp"
#include "splitres/synthetic.hpp"

namespace splitres {
namespace {

using testing::add_split;
using testing::chain_document;
using testing::mid;

Document two_entity_doc() {
  // m0, m1 distinct entities; m2 plural referring to both.
  Document doc = chain_document("d", {0, 1, 2});
  add_split(doc, "m2", {"m0", "m1"});
  return doc;
}

TEST(LoadCorpus, EmptyFileGivesEmptyCorpus) {
  const auto dir = testing::fresh_dir("corpus-empty");
  testing::write_text(dir / "empty.jsonl", "");
  EXPECT_TRUE(load_corpus(dir / "empty.jsonl").documents.empty());
}

TEST(LoadCorpus, RoundTripsByteIdentically) {
  const auto dir = testing::fresh_dir("corpus-roundtrip");
  Corpus c;
  c.documents.push_back(two_entity_doc());
  save_corpus(c, dir / "a.jsonl");
  const Corpus back = load_corpus(dir / "a.jsonl");
  ASSERT_EQ(back.documents.size(), 1u);
  EXPECT_EQ(back.documents[0], c.documents[0]);
  save_corpus(back, dir / "b.jsonl");
  EXPECT_EQ(testing::read_text(dir / "a.jsonl"), testing::read_text(dir / "b.jsonl"));
}

TEST(LoadCorpus, SyntheticRoundTripIsIdentity) {
  SyntheticConfig config;
  config.num_docs = 5;
  config.bridging_rate = 0.5;
  config.crowd_annotators = 3;
  const Corpus c = generate_synthetic(config);
  const auto dir = testing::fresh_dir("corpus-synth-roundtrip");
  save_corpus(c, dir / "c.jsonl");
  const Corpus back = load_corpus(dir / "c.jsonl");
  EXPECT_EQ(back.documents, c.documents);
}

TEST(LoadCorpus, MalformedLineNamesLineNumber) {
  const auto dir = testing::fresh_dir("corpus-malformed");
  Corpus c;
  c.documents.push_back(two_entity_doc());
  save_corpus(c, dir / "c.jsonl");
  testing::write_text(dir / "c.jsonl", testing::read_text(dir / "c.jsonl") + "{not json\n");
  try {
    load_corpus(dir / "c.jsonl");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(LoadCorpus, AnaphorBeforeAntecedentIsValidationError) {
  Document doc = chain_document("bad", {0, 1, 2});
  add_split(doc, "m0", {"m1", "m2"});
  const auto dir = testing::fresh_dir("corpus-order");
  testing::write_text(dir / "c.jsonl", document_to_json(doc) + "\n");
  try {
    load_corpus(dir / "c.jsonl");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.doc_id(), "bad");
    EXPECT_NE(std::string(e.what()).find("precede"), std::string::npos);
  }
}

TEST(LoadCorpus, RejectsUnknownKeys) {
  EXPECT_THROW(document_from_json(R"({"doc_id":"d","tokens":[],"mentions":[],"clusters":[],)"
                                  R"("split_anaphors":{},"extra":1})"),
               std::invalid_argument);
}

TEST(LoadCorpus, OptionalLayersDefaultToEmpty) {
  const Document doc = document_from_json(
      R"({"doc_id":"d","tokens":["a"],"mentions":[{"id":"m0","start":0,"end":0}],)"
      R"("clusters":[["m0"]],"split_anaphors":{}})");
  EXPECT_TRUE(doc.bridging.empty());
  EXPECT_TRUE(doc.crowd.empty());
}

TEST(ValidateDocument, WellFormedHasNoViolations) {
  EXPECT_TRUE(validate_document(two_entity_doc()).empty());
}

TEST(ValidateDocument, SingleAntecedent) {
  Document doc = chain_document("d", {0, 1, 2, 3});
  add_split(doc, "a3", {});
  doc.mentions[3].id = "a3";
  doc.clusters[3] = {"a3"};
  doc.split_anaphors[0].antecedents = {"m0"};
  const auto v = validate_document(doc);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "split anaphor must have ≥2 antecedents: a3");
}

TEST(ValidateDocument, SingleAntecedentAllowedForAuxiliaryData) {
  Document doc = chain_document("d", {0, 1});
  add_split(doc, "m1", {"m0"});
  ValidationOptions aux;
  aux.min_antecedents = 1;
  EXPECT_TRUE(validate_document(doc, aux).empty());
}

TEST(ValidateDocument, AntecedentsInSameCluster) {
  Document doc = chain_document("d", {0, 0, 1});
  add_split(doc, "m2", {"m0", "m1"});
  const auto v = validate_document(doc);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("distinct clusters"), std::string::npos);
  EXPECT_NE(v[0].find("m2"), std::string::npos);
}

TEST(ValidateDocument, MentionOutsideClusters) {
  Document doc = chain_document("d", {0, 1});
  doc.clusters.pop_back();
  const auto v = validate_document(doc);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("exactly one cluster"), std::string::npos);
}

TEST(ValidateDocument, SpanOutOfRangeAndUnknownId) {
  Document doc = chain_document("d", {0, 1, 2});
  doc.mentions[0].end = 7;
  add_split(doc, "m2", {"m0", "zz"});
  const auto v = validate_document(doc);
  EXPECT_EQ(v.size(), 2u);
}

TEST(ValidateDocument, PrecedenceBreaksStartTiesByEnd) {
  // m0 = [0,0] precedes m1 = [0,2].
  Document doc;
  doc.doc_id = "d";
  doc.tokens = {"a", "b", "c", "d"};
  doc.mentions = {{"m0", 0, 0}, {"m1", 0, 2}, {"m2", 1, 1}, {"m3", 3, 3}};
  doc.clusters = {{"m0"}, {"m1"}, {"m2"}, {"m3"}};
  add_split(doc, "m1", {"m0", "m3"});
  const auto v = validate_document(doc);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("m3 -> m1"), std::string::npos);
}

TEST(CandidateAntecedents, FirstMentionHasNone) {
  EXPECT_TRUE(candidate_antecedents(two_entity_doc(), "m0").empty());
}

TEST(CandidateAntecedents, NearestFirstWhenWindowNotBinding) {
  const Document doc = chain_document("d", {0, 1, 2, 3});
  EXPECT_EQ(candidate_antecedents(doc, "m3"), (std::vector<std::string>{"m2", "m1", "m0"}));
}

TEST(CandidateAntecedents, WindowKeepsThe250Nearest) {
  std::vector<int> labels(301);
  for (int k = 0; k < 301; ++k) labels[k] = k;
  const Document doc = chain_document("d", labels);
  const auto c = candidate_antecedents(doc, "m300");
  ASSERT_EQ(c.size(), 250u);
  EXPECT_EQ(c.front(), "m299");
  EXPECT_EQ(c.back(), "m50");
}

TEST(CandidateAntecedents, UnknownAnaphorThrows) {
  EXPECT_THROW(candidate_antecedents(two_entity_doc(), "nope"), std::out_of_range);
}

TEST(CandidateAntecedents, UsesDocumentOrderNotFileOrder) {
  Document doc = chain_document("d", {0, 1, 2});
  std::reverse(doc.mentions.begin(), doc.mentions.end());
  EXPECT_EQ(candidate_antecedents(doc, "m2"), (std::vector<std::string>{"m1", "m0"}));
}

TEST(CandidateAntecedents, PropertyStrictlyIncreasingDistanceAndBounded) {
  SyntheticConfig config;
  config.num_docs = 10;
  const Corpus corpus = generate_synthetic(config);
  for (const auto& doc : corpus.documents) {
    const DocumentIndex index(doc);
    for (std::size_t window : {1u, 5u, 250u}) {
      for (const auto& m : doc.mentions) {
        const auto c = candidate_antecedents(doc, m.id, window);
        EXPECT_LE(c.size(), window);
        EXPECT_EQ(std::count(c.begin(), c.end(), m.id), 0);
        for (std::size_t k = 0; k < c.size(); ++k) {
          EXPECT_TRUE(index.precedes(c[k], m.id));
          if (k > 0) EXPECT_GT(index.rank_of(c[k - 1]), index.rank_of(c[k]));
        }
      }
    }
  }
}

TEST(ExtendAnaphors, SingletonClusterUnchanged) {
  const Document doc = two_entity_doc();
  EXPECT_EQ(extend_anaphors(doc), doc);
}

TEST(ExtendAnaphors, ClusterMateAfterAntecedentsGainsThem) {
  Document doc = chain_document("d", {0, 1, 2, 2});
  add_split(doc, "m2", {"m0", "m1"});
  const Document out = extend_anaphors(doc);
  ASSERT_EQ(out.split_anaphors.size(), 2u);
  EXPECT_EQ(out.split_anaphors[0], doc.split_anaphors[0]);
  EXPECT_EQ(out.split_anaphors[1], (SplitAnaphor{"m3", {"m0", "m1"}}));
}

TEST(ExtendAnaphors, ClusterMateBeforeAnAntecedentIsSkipped) {
  // Cluster {m1, m3}; the anaphor m3 has antecedents m0 and m2, so m1 does
  // not follow both of them.
  Document doc = chain_document("d", {0, 2, 1, 2});
  add_split(doc, "m3", {"m0", "m2"});
  EXPECT_EQ(extend_anaphors(doc).split_anaphors.size(), 1u);
}

TEST(ExtendAnaphors, IdempotentAndMonotoneOnSynthetic) {
  SyntheticConfig config;
  config.num_docs = 30;
  config.coref_rate = 0.5;
  for (const auto& doc : generate_synthetic(config).documents) {
    const Document once = extend_anaphors(doc);
    EXPECT_EQ(extend_anaphors(once), once);
    ASSERT_GE(once.split_anaphors.size(), doc.split_anaphors.size());
    for (std::size_t k = 0; k < doc.split_anaphors.size(); ++k) {
      EXPECT_EQ(once.split_anaphors[k], doc.split_anaphors[k]);
    }
    EXPECT_TRUE(validate_document(once).empty());
    EXPECT_EQ(once.split_anaphors.size(), testing::extension_closed_form(doc));
  }
}

TEST(DocumentIndex, UnknownIdThrows) {
  const Document doc = two_entity_doc();
  const DocumentIndex index(doc);
  EXPECT_THROW(index.index_of("zz"), std::out_of_range);
  EXPECT_TRUE(index.contains("m1"));
  EXPECT_EQ(index.cluster_of("m1"), 1);
}

}  // namespace
}  // namespace splitres
