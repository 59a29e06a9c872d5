#include "sgsum/ranking.hpp"

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "sgsum/rng.hpp"
#include "support/oracles.hpp"

namespace sgsum {
namespace {

Cluster cluster_of(const std::vector<std::string>& sentences) {
  ClusterRecord r;
  r.cluster_id = "c";
  std::string text;
  for (const auto& s : sentences) text += s + " ";
  // One document per sentence keeps segmentation out of the picture.
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    r.documents.push_back({std::to_string(i), sentences[i]});
  }
  return prepare_cluster(r);
}

TEST(SentenceRanking, IdenticalAndDisjointSentences) {
  const Cluster c = cluster_of({"Xyz abc.", "A b c d.", "Q w e."});
  const Tokens ref = tokenize("A b c d");
  const auto scores = sentence_rouge_ranking(c, ref);
  EXPECT_EQ(scores[1].first, 1.0);
  EXPECT_EQ(scores[0], (SentenceRouge{0.0, 0.0}));
  EXPECT_EQ(top_k_indices<SentenceRouge>(scores, 1).front(), 1u);
}

TEST(SentenceRanking, MatchesDirectRougeCalls) {
  const Cluster c = cluster_of({"Giá xăng tăng mạnh hôm nay.", "Người dân lo lắng về giá xăng.",
                                "Trời mưa to.", "Giá điện tăng.", "Xăng tăng giá mạnh."});
  const Tokens ref = tokenize("giá xăng tăng mạnh khiến người dân lo lắng");
  const auto scores = sentence_rouge_ranking(c, ref);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(scores[i].first, testing::brute_rouge(c.sentences[i].tokens, ref, 2).f);
    EXPECT_EQ(scores[i].second, testing::brute_rouge(c.sentences[i].tokens, ref, 1).f);
  }
}

TEST(Candidates, CountsAndOrder) {
  const std::vector<double> scores = {0.1, 0.9, 0.5, 0.7, 0.3};
  const std::vector<std::size_t> two = {2};
  const auto c = generate_candidates<double>(scores, 4, two);
  ASSERT_EQ(c.size(), 6u);
  // Top four are {1, 3, 2, 4}, sorted to {1, 2, 3, 4}.
  EXPECT_EQ(c.front().members, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(c.back().members, (std::vector<std::size_t>{3, 4}));
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LT(c[i - 1].members, c[i].members);
}

TEST(Candidates, WholeClusterAndPaperSetting) {
  std::vector<double> scores(12);
  std::iota(scores.begin(), scores.end(), 0.0);
  const std::vector<std::size_t> all = {5};
  EXPECT_EQ(generate_candidates<double>(std::span(scores).first(5), 5, all).size(), 1u);
  const std::vector<std::size_t> nine = {9};
  const auto c = generate_candidates<double>(scores, 10, nine);
  EXPECT_EQ(c.size(), 10u);
  for (const auto& cand : c) {
    EXPECT_EQ(cand.members.size(), 9u);
    for (std::size_t m : cand.members) EXPECT_GE(m, 2u);
  }
}

TEST(Candidates, TiesPreferLowerIndex) {
  const std::vector<double> scores = {0.5, 0.5, 0.5, 0.5};
  const std::vector<std::size_t> one = {1};
  const auto c = generate_candidates<double>(scores, 2, one);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].members, std::vector<std::size_t>{0});
  EXPECT_EQ(c[1].members, std::vector<std::size_t>{1});
}

TEST(Candidates, Errors) {
  const std::vector<double> scores = {0.1, 0.2};
  const std::vector<std::size_t> three = {3};
  EXPECT_THROW(generate_candidates<double>(scores, 4, three), Error);  // fewer sentences
  EXPECT_THROW(generate_candidates<double>(scores, 2, three), Error);  // K < size
  const std::vector<std::size_t> none;
  EXPECT_THROW(generate_candidates<double>(scores, 2, none), Error);
  std::vector<double> many(40, 1.0);
  const std::vector<std::size_t> big = {10};
  EXPECT_THROW(generate_candidates<double>(many, 30, big), Error);  // cap
}

TEST(GreedyOracle, VerbatimReferenceSentence) {
  const Cluster c = cluster_of({"Trời mưa.", "A b c d e.", "A b x."});
  const OracleSummary o = greedy_oracle(c, tokenize("a b c d e"), 3);
  EXPECT_EQ(o.members, std::vector<std::size_t>{1});
  EXPECT_EQ(rouge_n(concat_tokens(c, o.members), tokenize("a b c d e"), 2).f1, 1.0);
}

TEST(GreedyOracle, NoOverlapPicksFirstSentence) {
  const Cluster c = cluster_of({"X y.", "Z w."});
  const OracleSummary o = greedy_oracle(c, tokenize("a b"), 3);
  EXPECT_EQ(o.members, std::vector<std::size_t>{0});
  EXPECT_EQ(o.score, 0.0);
}

TEST(GreedyOracle, FixtureConfirmedByExhaustiveSearch) {
  const Cluster c = cluster_of({"A b c d.", "A b x y.", "Q w e r."});
  const Tokens ref = tokenize("a b c d");
  const OracleSummary o = greedy_oracle(c, ref, 2);
  EXPECT_EQ(o.members, std::vector<std::size_t>{0});
  for (const auto& subset : testing::all_subsets(3, 2)) {
    if (subset.size() < 2) continue;
    if (std::find(subset.begin(), subset.end(), 0u) == subset.end()) continue;
    const double s = oracle_objective(concat_tokens(c, subset), ref, OracleObjective::kMeanRouge12);
    EXPECT_LE(s, o.score);
  }
}

TEST(GreedyOracle, Errors) {
  const Cluster c = cluster_of({"A b."});
  EXPECT_THROW(greedy_oracle(c, {}, 2), Error);
  EXPECT_THROW(greedy_oracle(c, {"a"}, 0), Error);
}

TEST(GreedyOracle, LabelsMatchMembers) {
  EXPECT_EQ(oracle_labels(5, {1, 3}), (std::vector<int>{0, 1, 0, 1, 0}));
}

Tensor unit(std::size_t dim, std::size_t axis, double value = 1.0) {
  Tensor t = Tensor::matrix(1, dim);
  t[axis] = value;
  return t;
}

// A vector at the given angle from the first axis in the first plane.
Tensor at_cosine(double c) { return Tensor::row({c, std::sqrt(1 - c * c), 0.0}); }

TEST(Losses, PairwiseExamples) {
  Tape tape;
  const Var gold = tape.constant(unit(3, 0));
  {
    const std::vector<Var> cands = {tape.constant(at_cosine(0.9)), tape.constant(at_cosine(0.7))};
    EXPECT_NEAR(loss_pairwise(cands, gold, 0.1).value().item(), 0.0, 1e-12);
  }
  {
    const std::vector<Var> cands = {tape.constant(at_cosine(0.7)), tape.constant(at_cosine(0.9))};
    EXPECT_NEAR(loss_pairwise(cands, gold, 0.1).value().item(), 0.3, 1e-12);
  }
}

TEST(Losses, PairwiseWithIdenticalCandidatesIsMeanMargin) {
  Tape tape;
  const Var gold = tape.constant(unit(3, 0));
  std::vector<Var> cands(5, tape.constant(at_cosine(0.4)));
  double margins = 0.0;
  int pairs = 0;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      margins += 0.01 * (j - i);
      ++pairs;
    }
  }
  EXPECT_NEAR(loss_pairwise(cands, gold, 0.01).value().item(), margins / pairs, 1e-12);
}

TEST(Losses, PairwiseSingleCandidateWarns) {
  Tape tape;
  const Var gold = tape.constant(unit(3, 0));
  const std::vector<Var> one = {gold};
  std::vector<std::string> warnings;
  EXPECT_EQ(loss_pairwise(one, gold, 0.01, &warnings).value().item(), 0.0);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Losses, PairwiseIsZeroOnMarginConsistentOrderings) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    Tape tape;
    const Var gold = tape.constant(unit(3, 0));
    const std::size_t n = 2 + rng.next_u64() % 8;
    const double gamma0 = rng.uniform(0.0, 0.05);
    std::vector<Var> cands;
    double c = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      cands.push_back(tape.constant(at_cosine(c)));
      c -= gamma0 + rng.uniform(1e-9, 0.02);
    }
    EXPECT_EQ(loss_pairwise(cands, gold, gamma0).value().item(), 0.0);
  }
}

TEST(Losses, GlobalExtremes) {
  Tape tape;
  const Var d = tape.constant(Tensor::row({1.0, 2.0, 0.0}));
  EXPECT_NEAR(loss_global(d, tape.constant(Tensor::row({2.0, 4.0, 0.0}))).value().item(), 0.0, 1e-12);
  EXPECT_NEAR(loss_global(d, tape.constant(Tensor::row({-2.0, 1.0, 5.0}))).value().item(), 1.0, 1e-12);
  EXPECT_NEAR(loss_global(d, tape.constant(Tensor::row({-1.0, -2.0, 0.0}))).value().item(), 2.0, 1e-12);
  EXPECT_THROW(loss_global(d, tape.constant(Tensor::matrix(1, 3))), Error);
}

TEST(Losses, SentenceBce) {
  Tape tape;
  EXPECT_NEAR(loss_sent(tape.constant(Tensor({2, 1}, {0.5, 0.5})), {1, 0}).value().item(),
              2 * std::log(2.0), 1e-12);
  EXPECT_NEAR(loss_sent(tape.constant(Tensor({1, 1}, {1 - 1e-7})), {1}).value().item(), 1e-7, 1e-12);
  EXPECT_THROW(loss_sent(tape.constant(Tensor({2, 1}, {0.5, 0.5})), {1}), Error);
}

TEST(Losses, SentenceBceMatchesHandRolledScript) {
  Rng rng(71);
  std::vector<double> p(8);
  std::vector<int> y(8);
  for (std::size_t i = 0; i < 8; ++i) {
    p[i] = rng.uniform(0.01, 0.99);
    y[i] = rng.uniform() < 0.5;
  }
  double ref = 0.0;
  for (std::size_t i = 0; i < 8; ++i) ref -= y[i] ? std::log(p[i]) : std::log(1 - p[i]);
  Tape tape;
  EXPECT_NEAR(loss_sent(tape.constant(Tensor({8, 1}, p)), y).value().item(), ref, 1e-12);
}

TEST(Losses, TotalIsUnweightedSum) {
  Tape tape;
  const Var t = total_loss(tape.constant(Tensor::scalar(1.0)), tape.constant(Tensor::scalar(0.5)),
                           tape.constant(Tensor::scalar(0.25)));
  EXPECT_EQ(t.value().item(), 1.75);
  const Var z = total_loss(tape.constant(Tensor::scalar(0.0)), tape.constant(Tensor::scalar(0.0)),
                           tape.constant(Tensor::scalar(0.0)));
  EXPECT_EQ(z.value().item(), 0.0);
}

TEST(Select, Examples) {
  std::vector<CandidateSummary> cands(3);
  cands[0].members = {0, 1};
  cands[1].members = {0, 2};
  cands[2].members = {1, 2};
  const Tensor d = Tensor::row({1.0, 2.0, 3.0});
  std::vector<Tensor> reprs = {Tensor::row({-2.0, 1.0, 0.0}), Tensor::row({2.0, 4.0, 6.0}),
                               Tensor::row({3.0, 0.0, -1.0})};
  EXPECT_EQ(select_summary(cands, reprs, d), 1u);
  for (Tensor& r : reprs) {
    for (double& v : r.data()) v *= 3.0;
  }
  EXPECT_EQ(select_summary(cands, reprs, d), 1u);
  const std::vector<CandidateSummary> one = {cands[2]};
  const std::vector<Tensor> one_repr = {Tensor::row({-1.0, -1.0, -1.0})};
  EXPECT_EQ(select_summary(one, one_repr, d), 0u);
  EXPECT_THROW(select_summary({}, {}, d), Error);
}

TEST(Select, TiesGoToLexicographicallySmallest) {
  std::vector<CandidateSummary> cands(2);
  cands[0].members = {0, 3};
  cands[1].members = {1, 2};
  const Tensor d = Tensor::row({1.0, 0.0});
  const std::vector<Tensor> reprs = {Tensor::row({2.0, 0.0}), Tensor::row({5.0, 0.0})};
  EXPECT_EQ(select_summary(cands, reprs, d), 0u);
}

TEST(Objective, Names) {
  EXPECT_EQ(parse_oracle_objective("rouge_2"), OracleObjective::kRouge2);
  EXPECT_EQ(to_string(OracleObjective::kMeanRouge12), "mean_rouge_1_2");
  EXPECT_THROW(parse_oracle_objective("x"), Error);
}

}  // namespace
}  // namespace sgsum
