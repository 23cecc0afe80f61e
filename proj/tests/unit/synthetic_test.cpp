#include <gtest/gtest.h>

#include <set>

#include "builders.hpp"
#include "splitres/corpus.hpp"
#include "splitres/synthetic.hpp"

namespace splitres {
namespace {

TEST(Synthetic, SameSeedSameCorpus) {
  SyntheticConfig config;
  config.num_docs = 8;
  config.seed = 42;
  const Corpus a = generate_synthetic(config);
  const Corpus b = generate_synthetic(config);
  EXPECT_EQ(a.documents, b.documents);
  config.seed = 43;
  EXPECT_NE(generate_synthetic(config).documents, a.documents);
}

TEST(Synthetic, EveryDocumentValidates) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SyntheticConfig config;
    config.seed = seed;
    config.bridging_rate = 0.3;
    config.crowd_annotators = 4;
    for (const auto& doc : generate_synthetic(config).documents) {
      EXPECT_TRUE(validate_document(doc).empty()) << doc.doc_id;
    }
  }
}

TEST(Synthetic, DefaultConfigLoadsCleanly) {
  const auto dir = testing::fresh_dir("synth-load");
  save_corpus(generate_synthetic({}), dir / "c.jsonl");
  EXPECT_EQ(load_corpus(dir / "c.jsonl").documents.size(), 50u);
}

TEST(Synthetic, ZeroRateHasNoSplitAnaphors) {
  SyntheticConfig config;
  config.split_anaphor_rate = 0;
  for (const auto& doc : generate_synthetic(config).documents) {
    EXPECT_TRUE(doc.split_anaphors.empty());
  }
}

TEST(Synthetic, AntecedentsShareTheAnaphorMarker) {
  for (const auto& doc : generate_synthetic({}).documents) {
    const DocumentIndex index(doc);
    for (const auto& split : doc.split_anaphors) {
      const auto& a = index.mention(split.anaphor);
      const std::string& marker = doc.tokens[a.end];
      for (const auto& ante : split.antecedents) {
        const auto& m = index.mention(ante);
        bool found = false;
        for (int t = m.start; t <= m.end; ++t) found = found || doc.tokens[t] == marker;
        EXPECT_TRUE(found) << doc.doc_id << " " << ante << " lacks " << marker;
      }
    }
  }
}

TEST(Synthetic, AntecedentCountHistogramFollowsWeights) {
  SyntheticConfig config;
  config.num_docs = 50;
  config.tokens_per_doc = 240;
  config.split_anaphor_rate = 0.1;
  config.antecedent_count_weights = {0.7, 0.3, 0.0, 0.0};
  const CorpusStats stats = compute_stats(generate_synthetic(config));
  ASSERT_GE(stats.split_anaphors, 200u);
  const double n = static_cast<double>(stats.split_anaphors);
  EXPECT_NEAR(stats.antecedent_histogram.at(2) / n, 0.7, 0.1);
  EXPECT_NEAR(stats.antecedent_histogram.at(3) / n, 0.3, 0.1);
  EXPECT_EQ(stats.antecedent_histogram.count(4) + stats.antecedent_histogram.count(5), 0u);
}

TEST(Synthetic, InfeasibleConfigThrows) {
  SyntheticConfig config;
  config.tokens_per_doc = 10;
  config.mention_density = 0.9;
  EXPECT_THROW(generate_synthetic(config), std::invalid_argument);
  config = {};
  config.split_anaphor_rate = 1.5;
  EXPECT_THROW(generate_synthetic(config), std::invalid_argument);
}

TEST(Synthetic, ConfigJsonRoundTrip) {
  SyntheticConfig config;
  config.num_docs = 7;
  config.antecedent_count_weights = {0.1, 0.2, 0.3, 0.4};
  config.doc_prefix = "x";
  const SyntheticConfig back = synthetic_config_from_json(synthetic_config_to_json(config));
  EXPECT_EQ(synthetic_config_to_json(back), synthetic_config_to_json(config));
  EXPECT_EQ(back.antecedent_count_weights, config.antecedent_count_weights);
}

TEST(Synthetic, CrowdAndBridgingLayersOnRequest) {
  SyntheticConfig config;
  config.bridging_rate = 1.0;
  config.crowd_annotators = 3;
  const CorpusStats stats = compute_stats(generate_synthetic(config));
  EXPECT_EQ(stats.crowd_annotations, 3 * stats.split_anaphors);
  EXPECT_EQ(stats.bridging_links, stats.antecedent_links);
}

TEST(Synthetic, DocIdsUseThePrefix) {
  SyntheticConfig config;
  config.num_docs = 3;
  config.doc_prefix = "aux";
  std::set<std::string> ids;
  for (const auto& doc : generate_synthetic(config).documents) {
    EXPECT_EQ(doc.doc_id.rfind("aux", 0), 0u);
    ids.insert(doc.doc_id);
  }
  EXPECT_EQ(ids.size(), 3u);
}

}  // namespace
}  // namespace splitres
