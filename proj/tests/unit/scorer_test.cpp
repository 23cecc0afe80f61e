#include <gtest/gtest.h>

#include <cmath>

#include "builders.hpp"
#include "oracles.hpp"
#include "splitres/scorer.hpp"

namespace splitres {
namespace {

std::vector<PairScore> scores_from(const std::vector<double>& probs) {
  std::vector<PairScore> out;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double p = probs[k];
    out.push_back({"a", "c" + std::to_string(k), std::log(p / (1 - p)), p});
  }
  return out;
}

std::vector<int> distinct_labels(std::size_t n) {
  std::vector<int> labels(n);
  for (std::size_t k = 0; k < n; ++k) labels[k] = static_cast<int>(k);
  return labels;
}

TEST(PairRepr, BlocksAndDimension) {
  Rng rng(1);
  Vector v(28);
  for (Eigen::Index i = 0; i < 28; ++i) v(i) = rng.uniform(-1, 1);
  Matrix dist = Matrix::Random(9, 4);
  const PairRepr p = pair_repr(v, v, 3, dist);
  ASSERT_EQ(p.vector.size(), 88);
  EXPECT_TRUE(p.vector.segment(56, 28).isApprox(v.cwiseProduct(v)));
  EXPECT_TRUE(p.vector.segment(84, 4).isApprox(dist.row(2).transpose()));
}

TEST(PairRepr, AntecedentBlockComesFirst) {
  Vector a = Vector::Constant(2, 1.0), b = Vector::Constant(2, 2.0);
  const PairRepr p = pair_repr(a, b, 1, Matrix::Zero(9, 1));
  EXPECT_EQ(p.vector.head(2), a);
  EXPECT_EQ(p.vector.segment(2, 2), b);
  EXPECT_EQ(p.vector.segment(4, 2), Vector::Constant(2, 2.0));
}

TEST(PairRepr, DistantPairsUseDifferentBuckets) {
  const Matrix dist = Matrix::Zero(9, 1);
  EXPECT_NE(pair_repr(Vector::Ones(1), Vector::Ones(1), 1, dist).distance_bucket,
            pair_repr(Vector::Ones(1), Vector::Ones(1), 100, dist).distance_bucket);
  EXPECT_THROW(distance_bucket(0), std::invalid_argument);
}

TEST(PairProb, ClosedForms) {
  EXPECT_DOUBLE_EQ(pair_prob(0), 0.5);
  EXPECT_NEAR(pair_prob(std::log(3.0)), 0.75, 1e-15);
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const double r = rng.uniform(-40, 40);
    EXPECT_NEAR(pair_prob(r) + pair_prob(-r), 1.0, 1e-15);
  }
  EXPECT_GT(pair_prob(-700), 0.0);
  EXPECT_TRUE(std::isfinite(pair_prob(-800)));
  EXPECT_LE(pair_prob(800), 1.0);
}

class PairScorerTest : public ::testing::Test {
 protected:
  PairScorerTest() : rng_(3), scorer_(store_, 7, 5, 2, rng_) {
    for (auto& p : store_.all()) {
      for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = rng_.uniform(-1, 1);
    }
  }
  Rng rng_;
  ParameterStore store_;
  PairScorer scorer_;
};

TEST_F(PairScorerTest, MatchesLoopImplementation) {
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(7);
    for (Eigen::Index i = 0; i < 7; ++i) x(i) = rng_.uniform(-2, 2);
    EXPECT_NEAR(scorer_.logit(x), testing::ffnn_oracle(store_, x), 1e-6);
    EXPECT_EQ(scorer_.logit(x), scorer_.logit(x));
  }
}

TEST_F(PairScorerTest, ZeroParametersGiveZeroLogits) {
  for (auto& p : store_.all()) p.value.setZero();
  EXPECT_EQ(scorer_.logits(Matrix::Random(4, 7)), Vector::Zero(4));
}

TEST_F(PairScorerTest, WrongWidthAndNonFiniteThrow) {
  EXPECT_THROW(scorer_.logits(Matrix::Zero(1, 6)), std::invalid_argument);
  Matrix bad = Matrix::Zero(1, 7);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(scorer_.logits(bad), std::runtime_error);
}

TEST(MarginalLoss, ClosedForms) {
  EXPECT_NEAR(marginal_loss(Vector::Zero(1), 0.0, {true}).loss, std::log(2.0), 1e-12);
  EXPECT_NEAR(marginal_loss(Vector::Zero(2), 0.0, {true, true}).loss, -std::log(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(marginal_loss(Vector::Zero(2), 30.0, {false, false}).loss, 0.0, 1e-12);
}

TEST(MarginalLoss, OnlyEpsilonGivesZero) {
  const LossResult r = marginal_loss(Vector(0), 0.0, {});
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.d_epsilon, 0.0);
}

TEST(MarginalLoss, NoCorrectCandidateTargetsEpsilon) {
  Vector logits(2);
  logits << 1.0, -1.0;
  const double z = 1 + std::exp(1.0) + std::exp(-1.0);
  EXPECT_NEAR(marginal_loss(logits, 0.0, {false, false}).loss, std::log(z), 1e-12);
}

TEST(MarginalLoss, UsesClusterMembership) {
  // c0, c1 in cluster 0 with gold antecedent g; c2 elsewhere.
  GoldClusterMap gold;
  gold.assign("g", 0);
  gold.assign("c0", 0);
  gold.assign("c1", 0);
  gold.assign("c2", 1);
  const CandidateSet cands{"a", {"c0", "c1", "c2"}, true};
  const std::vector<std::string> antecedents = {"g"};
  EXPECT_EQ(correct_candidates(cands, gold, antecedents), (std::vector<bool>{true, true, false}));
  EXPECT_NEAR(marginal_loss(cands, gold, antecedents, Vector::Zero(3)).loss, std::log(2.0), 1e-12);
}

TEST(MarginalLoss, NonNegativeMonotoneAndGradientMatchesDifferences) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    Vector logits(static_cast<Eigen::Index>(n));
    std::vector<bool> correct(n);
    for (std::size_t k = 0; k < n; ++k) {
      logits(static_cast<Eigen::Index>(k)) = rng.uniform(-5, 5);
      correct[k] = rng.bernoulli(0.4);
    }
    const double eps = rng.uniform(-2, 2);
    const LossResult r = marginal_loss(logits, eps, correct);
    EXPECT_GE(r.loss, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      Vector up = logits, down = logits;
      up(static_cast<Eigen::Index>(k)) += 1e-6;
      down(static_cast<Eigen::Index>(k)) -= 1e-6;
      const double fd = (marginal_loss(up, eps, correct).loss - marginal_loss(down, eps, correct).loss) / 2e-6;
      EXPECT_NEAR(r.d_logits(static_cast<Eigen::Index>(k)), fd, 1e-6);
      if (correct[k]) {
        Vector more = logits;
        more(static_cast<Eigen::Index>(k)) += 1.0;
        EXPECT_LE(marginal_loss(more, eps, correct).loss, r.loss + 1e-12);
      }
    }
    const double fd_eps =
        (marginal_loss(logits, eps + 1e-6, correct).loss - marginal_loss(logits, eps - 1e-6, correct).loss) / 2e-6;
    EXPECT_NEAR(r.d_epsilon, fd_eps, 1e-6);
  }
}

TEST(MarginalLoss, LengthMismatchThrows) {
  EXPECT_THROW(marginal_loss(Vector::Zero(2), 0.0, {true}), std::invalid_argument);
}

TEST(SelectAntecedents, ThresholdCapsAtFive) {
  const auto scores = scores_from({0.9, 0.7, 0.6, 0.55, 0.52, 0.51});
  EXPECT_EQ(select_antecedents(scores, testing::label_clusters(distinct_labels(6))),
            (std::vector<std::string>{"c0", "c1", "c2", "c3", "c4"}));
}

TEST(SelectAntecedents, FallbackTakesTopTwo) {
  const auto scores = scores_from({0.3, 0.4, 0.2});
  EXPECT_EQ(select_antecedents(scores, testing::label_clusters(distinct_labels(3))),
            (std::vector<std::string>{"c1", "c0"}));
}

TEST(SelectAntecedents, SkipsRepeatedCluster) {
  const auto scores = scores_from({0.9, 0.8, 0.7});
  EXPECT_EQ(select_antecedents(scores, testing::label_clusters({0, 0, 1})),
            (std::vector<std::string>{"c0", "c2"}));
}

TEST(SelectAntecedents, OneAboveThresholdFallsBack) {
  const auto scores = scores_from({0.2, 0.9, 0.45});
  EXPECT_EQ(select_antecedents(scores, testing::label_clusters(distinct_labels(3))),
            (std::vector<std::string>{"c1", "c2"}));
}

TEST(SelectAntecedents, ExactlyHalfIsNotAboveThreshold) {
  const auto scores = scores_from({0.5, 0.5, 0.9, 0.4});
  EXPECT_EQ(select_antecedents(scores, testing::label_clusters(distinct_labels(4))),
            (std::vector<std::string>{"c2", "c0"}));
}

TEST(SelectAntecedents, TooFewClustersThrowsNamingAnaphor) {
  const auto scores = scores_from({0.9, 0.8});
  try {
    select_antecedents(scores, testing::label_clusters({0, 0}));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("anaphor a"), std::string::npos);
  }
}

TEST(SelectAntecedents, RandomScoresObeyRule) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    std::vector<int> labels(n);
    std::vector<double> probs(n);
    for (std::size_t k = 0; k < n; ++k) {
      labels[k] = static_cast<int>(rng.below(n));
      probs[k] = rng.uniform(0.01, 0.99);
    }
    labels[0] = -1;
    labels[1] = -2;
    const auto scores = scores_from(probs);
    const auto clusters = testing::label_clusters(labels);
    const auto selected = select_antecedents(scores, clusters);
    EXPECT_EQ(testing::selection_violation(scores, clusters, selected), "");
  }
}

TEST(SelectAntecedents, InvariantUnderMonotoneTransformKeepingThresholdSide) {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    std::vector<double> probs(n), squashed(n);
    for (std::size_t k = 0; k < n; ++k) {
      probs[k] = rng.uniform(0.01, 0.99);
      // Odd power of the centred score keeps order and the side of 0.5.
      squashed[k] = 0.5 + 4 * std::pow(probs[k] - 0.5, 3);
    }
    const auto clusters = testing::label_clusters(distinct_labels(n));
    EXPECT_EQ(select_antecedents(scores_from(probs), clusters),
              select_antecedents(scores_from(squashed), clusters));
  }
}

TEST(GoldClusterMap, FromDocument) {
  const Document doc = testing::chain_document("d", {3, 1, 3});
  const GoldClusterMap map(doc);
  EXPECT_EQ(map.cluster("m0"), map.cluster("m2"));
  EXPECT_NE(map.cluster("m0"), map.cluster("m1"));
  EXPECT_THROW(map.cluster("zz"), std::out_of_range);
}

}  // namespace
}  // namespace splitres
