#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "sgsum/corpus.hpp"
#include "sgsum/graph.hpp"
#include "sgsum/tfidf.hpp"
#include "support/oracles.hpp"

namespace sgsum {
namespace {

TEST(TfIdf, IdfOfSharedToken) {
  const std::vector<Tokens> corpus = {{"a"}, {"a"}};
  EXPECT_DOUBLE_EQ(fit_tfidf(corpus).idf("a"), 1.0);
}

TEST(TfIdf, IdfOfDisjointTokens) {
  const std::vector<Tokens> corpus = {{"a"}, {"b"}};
  EXPECT_NEAR(fit_tfidf(corpus).idf("a"), std::log(1.5) + 1.0, 1e-15);
  EXPECT_NEAR(fit_tfidf(corpus).idf("a"), 1.405465, 1e-6);
}

TEST(TfIdf, EmptyCorpusIsAnError) {
  const std::vector<Tokens> corpus;
  EXPECT_THROW(fit_tfidf(corpus), Error);
}

TEST(TfIdf, VectorizeEdgeCases) {
  const std::vector<Tokens> corpus = {{"a", "b"}, {"b", "c"}};
  const TfIdfModel m = fit_tfidf(corpus);
  EXPECT_TRUE(m.vectorize({}).entries.empty());
  EXPECT_TRUE(m.vectorize({"zzz", "yyy"}).entries.empty());
}

TEST(TfIdf, VectorizeMatchesCountsTimesIdf) {
  const std::vector<Tokens> corpus = {{"hà", "nội", "mưa", "mưa"}, {"nội", "thành"}, {"mưa", "to"}};
  const TfIdfModel m = fit_tfidf(corpus);
  const SparseVector v = m.vectorize(corpus[0]);
  // Brute force: counts and df by direct scans.
  for (const auto& [idx, w] : v.entries) {
    std::string token;
    for (const auto& t : corpus[0]) {
      if (m.index_of(t) == idx) token = t;
    }
    const double count = double(std::count(corpus[0].begin(), corpus[0].end(), token));
    double df = 0;
    for (const auto& s : corpus) df += std::find(s.begin(), s.end(), token) != s.end();
    EXPECT_NEAR(w, count * (std::log(4.0 / (1.0 + df)) + 1.0), 1e-12) << token;
  }
  EXPECT_EQ(v.entries.size(), 3u);
}

TEST(TfIdf, EveryInCorpusTokenHasPositiveWeight) {
  const std::vector<Tokens> corpus = {{"a", "b", "a"}, {"b", "c"}, {"c", "d", "e"}, {"a"}};
  const TfIdfModel m = fit_tfidf(corpus);
  for (const auto& s : corpus) {
    const SparseVector v = m.vectorize(s);
    for (const auto& t : s) {
      auto it = std::find_if(v.entries.begin(), v.entries.end(),
                             [&](const auto& e) { return e.first == m.index_of(t); });
      ASSERT_NE(it, v.entries.end());
      EXPECT_GT(it->second, 0.0);
    }
  }
}

TEST(Cosine, Examples) {
  const SparseVector u{{{0, 1.0}, {1, 1.0}}};
  const SparseVector v{{{0, 1.0}}};
  EXPECT_NEAR(cosine(u, v), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(cosine(u, u), 1.0, 1e-12);
  EXPECT_EQ(cosine(SparseVector{{{0, 1.0}}}, SparseVector{{{1, 2.0}}}), 0.0);
  EXPECT_EQ(cosine(SparseVector{}, u), 0.0);
}

TEST(Cosine, SymmetricAndBoundedOnRandomVectors) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> w(0.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    SparseVector a, b;
    for (std::size_t i = 0; i < 12; ++i) {
      if (gen() % 2) a.entries.push_back({i, w(gen)});
      if (gen() % 2) b.entries.push_back({i, w(gen)});
    }
    const double ab = cosine(a, b);
    EXPECT_EQ(ab, cosine(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0 + 1e-12);
  }
}

ClusterRecord two_doc_record() {
  ClusterRecord r;
  r.cluster_id = "c";
  r.documents = {{"d0", "Giá xăng tăng mạnh. Người dân lo lắng. Giá điện cũng tăng."},
                 {"d1", "Xăng dầu tăng giá lần thứ ba. Người dân hạn chế đi lại."}};
  return r;
}

TEST(ClusterGraph, SingleSentence) {
  ClusterRecord r;
  r.cluster_id = "c";
  r.documents = {{"d", "Một câu duy nhất."}};
  const ClusterGraph g = build_cluster_graph(prepare_cluster(r), 1.0);
  EXPECT_EQ(g.similarity, Tensor::scalar(1.0));
  EXPECT_EQ(g.same_document, Tensor::scalar(1.0));
}

TEST(ClusterGraph, IdenticalSentencesInTwoDocuments) {
  ClusterRecord r;
  r.cluster_id = "c";
  r.documents = {{"a", "Trời mưa to."}, {"b", "Trời mưa to."}};
  const ClusterGraph g = build_cluster_graph(prepare_cluster(r), 1.0);
  EXPECT_EQ(g.similarity, Tensor({2, 2}, {1, 1, 1, 1}));
  EXPECT_EQ(g.same_document, Tensor({2, 2}, {1, 0, 0, 1}));
  const BiasMatrices b = bias_matrices(g);
  EXPECT_EQ(b.r(0, 1), 0.0);
  EXPECT_EQ(b.r_same(0, 1), -0.5);
  EXPECT_EQ(b.r_same(0, 0), 0.0);
}

TEST(ClusterGraph, MatchesBruteForceTfIdfCosine) {
  const Cluster c = prepare_cluster(two_doc_record());
  ASSERT_EQ(c.size(), 5u);
  const ClusterGraph g = build_cluster_graph(c, 1.0);
  const auto brute = testing::brute_tfidf_cosines(c.sentence_tokens());
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_NEAR(g.similarity(i, j), brute[i][j], 1e-12);
      const double same = c.sentences[i].doc_index == c.sentences[j].doc_index ? brute[i][j] : 0.0;
      EXPECT_NEAR(g.same_document(i, j), same, 1e-12);
    }
  }
}

TEST(ClusterGraph, BiasMatricesMatchElementwiseRecomputation) {
  const Cluster c = prepare_cluster(two_doc_record());
  const double sigma = 0.7;
  const ClusterGraph g = build_cluster_graph(c, sigma);
  for (BiasForm form : {BiasForm::kPaper, BiasForm::kSquaredDifference}) {
    const BiasMatrices b = bias_matrices(g, form);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        auto expect = [&](double m) {
          const double num = form == BiasForm::kPaper ? 1 - m * m : (1 - m) * (1 - m);
          return -num / (2 * sigma * sigma);
        };
        EXPECT_NEAR(b.r(i, j), expect(g.similarity(i, j)), 1e-15);
        EXPECT_NEAR(b.r_same(i, j), expect(g.same_document(i, j)), 1e-15);
      }
    }
  }
}

TEST(ClusterGraph, MatricesAreExactlySymmetric) {
  const Cluster c = prepare_cluster(two_doc_record());
  const ClusterGraph g = build_cluster_graph(c, 1.0);
  const BiasMatrices b = bias_matrices(g);
  EXPECT_EQ(g.similarity, transpose(g.similarity));
  EXPECT_EQ(g.same_document, transpose(g.same_document));
  EXPECT_EQ(b.r, transpose(b.r));
  EXPECT_EQ(b.r_same, transpose(b.r_same));
}

TEST(ClusterGraph, PermutingSentencesPermutesMatrices) {
  const Cluster c = prepare_cluster(two_doc_record());
  const ClusterGraph g = build_cluster_graph(c, 1.0);
  std::vector<std::size_t> perm = {3, 0, 4, 2, 1};
  Cluster permuted = c;
  for (std::size_t i = 0; i < perm.size(); ++i) permuted.sentences[i] = c.sentences[perm[i]];
  const ClusterGraph gp = build_cluster_graph(permuted, 1.0);
  EXPECT_EQ(gp.similarity, submatrix(g.similarity, perm));
  EXPECT_EQ(gp.same_document, submatrix(g.same_document, perm));
  EXPECT_EQ(bias_matrices(gp).r, submatrix(bias_matrices(g).r, perm));
}

TEST(ClusterGraph, GlobalTfIdfScope) {
  const Cluster c = prepare_cluster(two_doc_record());
  std::vector<Tokens> corpus = c.sentence_tokens();
  corpus.push_back({"giá", "vàng"});
  const TfIdfModel global = fit_tfidf(corpus);
  const ClusterGraph g = build_cluster_graph(c, 1.0, &global);
  const SparseVector a = global.vectorize(c.sentences[0].tokens);
  const SparseVector b = global.vectorize(c.sentences[2].tokens);
  EXPECT_NEAR(g.similarity(0, 2), cosine(a, b), 1e-15);
}

TEST(GaussianBias, SubstitutionCases) {
  EXPECT_EQ(gaussian_bias_value(1.0, 1.0), 0.0);
  EXPECT_EQ(gaussian_bias_value(1.0, 3.0), 0.0);
  EXPECT_EQ(gaussian_bias_value(0.0, 1.0), -0.5);
  EXPECT_EQ(gaussian_bias_value(0.5, 1.0), -0.375);
  EXPECT_EQ(gaussian_bias_value(1.0, 1.0, BiasForm::kSquaredDifference), 0.0);
  EXPECT_EQ(gaussian_bias_value(0.0, 1.0, BiasForm::kSquaredDifference), -0.5);
  EXPECT_EQ(gaussian_bias_value(0.5, 1.0, BiasForm::kSquaredDifference), -0.125);
}

TEST(GaussianBias, RejectsNonPositiveSigma) {
  EXPECT_THROW(gaussian_bias_value(0.5, 0.0), Error);
  EXPECT_THROW(gaussian_bias(Tensor::scalar(0.5), -1.0), Error);
}

TEST(GaussianBias, MonotoneAndBounded) {
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (BiasForm form : {BiasForm::kPaper, BiasForm::kSquaredDifference}) {
      double prev = -std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 1000; ++k) {
        const double v = gaussian_bias_value(k / 1000.0, sigma, form);
        EXPECT_GT(v, prev);
        EXPECT_GE(v, -1.0 / (2 * sigma * sigma));
        EXPECT_LE(v, 0.0);
        prev = v;
      }
    }
  }
}

TEST(GaussianBias, FormNames) {
  EXPECT_EQ(parse_bias_form("paper"), BiasForm::kPaper);
  EXPECT_EQ(parse_bias_form("squared_difference"), BiasForm::kSquaredDifference);
  EXPECT_EQ(to_string(BiasForm::kSquaredDifference), "squared_difference");
  EXPECT_THROW(parse_bias_form("other"), Error);
}

TEST(PrepareCluster, DropsTokenlessSentencesAndEmptyDocuments) {
  ClusterRecord r;
  r.cluster_id = "c";
  r.documents = {{"a", "!!! ... Một câu."}, {"b", "..."}, {"c", "Hai câu. Ba câu."}};
  const Cluster c = prepare_cluster(r);
  EXPECT_EQ(c.num_documents, 2u);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.sentences[0].doc_index, 0u);
  EXPECT_EQ(c.sentences[1].doc_index, 1u);
  EXPECT_EQ(c.sentences[2].sent_index, 1u);
}

}  // namespace
}  // namespace sgsum
