#pragma once

// Sentence graph of a cluster: complete tf-idf cosine matrix G, the
// same-document restriction G_same, and the Gaussian bias transforms that
// the graph attention adds to its logits.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgsum/corpus.hpp"
#include "sgsum/error.hpp"
#include "sgsum/tensor.hpp"
#include "sgsum/tfidf.hpp"

namespace sgsum {

enum class BiasForm {
  kPaper,              // -(1 - M^2) / (2 sigma^2)
  kSquaredDifference,  // -(1 - M)^2 / (2 sigma^2)
};

inline std::string to_string(BiasForm f) {
  return f == BiasForm::kPaper ? "paper" : "squared_difference";
}

inline BiasForm parse_bias_form(std::string_view s) {
  if (s == "paper") return BiasForm::kPaper;
  if (s == "squared_difference") return BiasForm::kSquaredDifference;
  detail::fail("unknown bias_form '", s, "' (expected paper|squared_difference)");
}

struct ClusterGraph {
  std::size_t n = 0;
  std::vector<std::size_t> doc_of;
  Tensor similarity;       // G
  Tensor same_document;    // G_same
  double sigma = 1.0;
};

struct BiasMatrices {
  Tensor r;
  Tensor r_same;
};

inline double gaussian_bias_value(double m, double sigma, BiasForm form = BiasForm::kPaper) {
  SGSUM_CHECK(sigma > 0.0, "gaussian_bias: sigma must be positive, got ", sigma);
  const double num = form == BiasForm::kPaper ? 1.0 - m * m : (1.0 - m) * (1.0 - m);
  return -num / (2.0 * sigma * sigma);
}

inline Tensor gaussian_bias(const Tensor& m, double sigma, BiasForm form = BiasForm::kPaper) {
  SGSUM_CHECK(sigma > 0.0, "gaussian_bias: sigma must be positive, got ", sigma);
  Tensor out(m.shape());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = gaussian_bias_value(m[i], sigma, form);
  return out;
}

// With `global_model` null the tf-idf statistics come from this cluster's
// sentences alone.
inline ClusterGraph build_cluster_graph(const Cluster& cluster, double sigma,
                                        const TfIdfModel* global_model = nullptr) {
  SGSUM_CHECK(sigma > 0.0, "build_cluster_graph: sigma must be positive, got ", sigma);
  SGSUM_CHECK(cluster.size() > 0, "build_cluster_graph: cluster '", cluster.id,
              "' has no non-empty sentences");
  const std::vector<Tokens> tokens = cluster.sentence_tokens();
  std::optional<TfIdfModel> local;
  if (global_model == nullptr) local = TfIdfModel::fit(tokens);
  const TfIdfModel& model = global_model ? *global_model : *local;

  std::vector<SparseVector> vecs;
  vecs.reserve(tokens.size());
  for (const Tokens& t : tokens) vecs.push_back(model.vectorize(t));

  ClusterGraph g;
  g.n = cluster.size();
  g.doc_of = cluster.doc_of();
  g.sigma = sigma;
  g.similarity = Tensor::matrix(g.n, g.n);
  g.same_document = Tensor::matrix(g.n, g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = i; j < g.n; ++j) {
      const double c = cosine(vecs[i], vecs[j]);
      g.similarity(i, j) = g.similarity(j, i) = c;
      if (g.doc_of[i] == g.doc_of[j]) g.same_document(i, j) = g.same_document(j, i) = c;
    }
  }
  return g;
}

inline BiasMatrices bias_matrices(const ClusterGraph& g, BiasForm form = BiasForm::kPaper) {
  return BiasMatrices{gaussian_bias(g.similarity, g.sigma, form),
                      gaussian_bias(g.same_document, g.sigma, form)};
}

}  // namespace sgsum
