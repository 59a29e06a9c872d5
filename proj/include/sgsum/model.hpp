#pragma once

// Ties the encoder and the ranking objective together: per-cluster training
// examples, the full training loss, and inference-time summary selection.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgsum/autodiff.hpp"
#include "sgsum/checkpoint.hpp"
#include "sgsum/config.hpp"
#include "sgsum/corpus.hpp"
#include "sgsum/encoder.hpp"
#include "sgsum/graph.hpp"
#include "sgsum/params.hpp"
#include "sgsum/ranking.hpp"
#include "sgsum/tfidf.hpp"

namespace sgsum {

inline EncoderInput encoder_input_for(const Cluster& cluster, const Vocabulary& vocab,
                                      const RunConfig& cfg, const TfIdfModel* global_tfidf) {
  const ClusterGraph graph = build_cluster_graph(cluster, cfg.encoder.sigma, global_tfidf);
  return make_encoder_input(cluster, vocab, bias_matrices(graph, cfg.bias_form));
}

inline TfIdfModel fit_global_tfidf(std::span<const Cluster> clusters) {
  std::vector<Tokens> all;
  for (const Cluster& c : clusters) {
    for (const Sentence& s : c.sentences) all.push_back(s.tokens);
  }
  return TfIdfModel::fit(all);
}

// Everything about one training cluster that does not depend on parameters.
struct TrainingExample {
  std::string cluster_id;
  EncoderInput input;
  OracleSummary oracle;
  std::vector<int> labels;
  std::vector<CandidateSummary> candidates;  // best ROUGE first
};

inline TrainingExample make_training_example(const Cluster& cluster, const Vocabulary& vocab,
                                             const RunConfig& cfg,
                                             const TfIdfModel* global_tfidf = nullptr) {
  SGSUM_CHECK(cluster.has_reference(), "cluster '", cluster.id, "' has no reference summary");
  TrainingExample ex;
  ex.cluster_id = cluster.id;
  ex.input = encoder_input_for(cluster, vocab, cfg, global_tfidf);
  ex.oracle = greedy_oracle(cluster, cluster.reference, cfg.max_oracle_sentences,
                            cfg.oracle_objective);
  ex.labels = oracle_labels(cluster.size(), ex.oracle.members);

  const std::vector<SentenceRouge> scores = sentence_rouge_ranking(cluster, cluster.reference);
  const std::vector<std::size_t> sizes = effective_sizes(cfg.candidate_sizes, cluster.size());
  ex.candidates = generate_candidates<SentenceRouge>(scores, cfg.top_k, sizes);
  for (CandidateSummary& c : ex.candidates) {
    c.rouge_rank_score =
        oracle_objective(concat_tokens(cluster, c.members), cluster.reference, cfg.oracle_objective);
  }
  std::stable_sort(ex.candidates.begin(), ex.candidates.end(),
                   [](const CandidateSummary& a, const CandidateSummary& b) {
                     return a.rouge_rank_score > b.rouge_rank_score;
                   });
  return ex;
}

struct ForwardOutputs {
  LossParts loss;
  Var document;                 // D
  Var gold;                     // C*
  Var y_hat;
  std::vector<Var> candidates;  // same order as TrainingExample::candidates
};

// Total loss = BCE over sentences + pairwise ranking + (1 - cos(D, C*)).
inline ForwardOutputs compute_loss(Forward& f, const TrainingExample& ex, double gamma0) {
  ForwardOutputs out;
  const SentenceEncodings enc = encode_documents(f, ex.input);
  out.document = pool_graph(f, enc.x);
  out.y_hat = sentence_scores(f, enc.x);
  out.gold = encode_subgraph(f, enc, ex.oracle.members, ex.input.bias);
  out.candidates.reserve(ex.candidates.size());
  for (const CandidateSummary& c : ex.candidates) {
    out.candidates.push_back(encode_subgraph(f, enc, c.members, ex.input.bias));
  }
  out.loss.sent = loss_sent(out.y_hat, ex.labels);
  out.loss.pairwise = loss_pairwise(out.candidates, out.gold, gamma0, &f.warnings);
  out.loss.global = loss_global(out.document, out.gold);
  out.loss.total = total_loss(out.loss.sent, out.loss.pairwise, out.loss.global);
  return out;
}

struct SelectedSummary {
  std::vector<std::size_t> members;  // original document order
  std::vector<double> sentence_scores;
  std::size_t candidate_count = 0;
  std::vector<std::string> warnings;
};

// Ranks sentences by the score head, enumerates candidates from the top-K
// and keeps the one whose sub-graph representation is closest to D.
inline SelectedSummary select_for_cluster(const ParamStore& store, const RunConfig& cfg,
                                          const Vocabulary& vocab, const Cluster& cluster,
                                          const TfIdfModel* global_tfidf = nullptr) {
  SelectedSummary out;
  SGSUM_CHECK(cluster.size() > 0, "cluster '", cluster.id, "' has no sentences");
  const EncoderInput input = encoder_input_for(cluster, vocab, cfg, global_tfidf);
  Tape tape;
  Forward f{tape, store, cfg.encoder, Mode::kEval};
  const SentenceEncodings enc = encode_documents(f, input);
  const Var document = pool_graph(f, enc.x);
  const Var y_hat = sentence_scores(f, enc.x);
  out.sentence_scores.assign(y_hat.value().data().begin(), y_hat.value().data().end());

  const std::size_t min_size = *std::min_element(cfg.candidate_sizes.begin(), cfg.candidate_sizes.end());
  if (cluster.size() < min_size) {
    out.warnings.push_back("cluster '" + cluster.id + "' has " + std::to_string(cluster.size()) +
                           " sentences, fewer than the smallest candidate size; emitting all");
    for (std::size_t i = 0; i < cluster.size(); ++i) out.members.push_back(i);
    return out;
  }
  const std::vector<std::size_t> sizes = effective_sizes(cfg.candidate_sizes, cluster.size());
  const std::vector<CandidateSummary> candidates =
      generate_candidates<double>(out.sentence_scores, cfg.top_k, sizes);
  std::vector<Tensor> reprs;
  reprs.reserve(candidates.size());
  for (const CandidateSummary& c : candidates) {
    reprs.push_back(encode_subgraph(f, enc, c.members, input.bias).value());
  }
  out.candidate_count = candidates.size();
  out.members = candidates[select_summary(candidates, reprs, document.value())].members;
  out.warnings.insert(out.warnings.end(), f.warnings.begin(), f.warnings.end());
  return out;
}

// A trained model as stored on disk.
struct Model {
  RunConfig config;
  Vocabulary vocab;
  ParamStore params;
};

inline Checkpoint model_checkpoint(const Model& m) {
  return make_checkpoint(m.params, {{"config", model_json(m.config).dump()},
                                    {"vocab", m.vocab.serialize()}});
}

inline Model model_from_checkpoint(const Checkpoint& ckpt) {
  auto cfg_it = ckpt.metadata.find("config");
  auto vocab_it = ckpt.metadata.find("vocab");
  SGSUM_CHECK(cfg_it != ckpt.metadata.end() && vocab_it != ckpt.metadata.end(),
              "checkpoint lacks config or vocabulary metadata");
  Model m;
  m.config = apply_json(paper_profile(), nlohmann::ordered_json::parse(cfg_it->second));
  m.vocab = Vocabulary::deserialize(vocab_it->second);
  SGSUM_CHECK(m.vocab.size() == m.config.encoder.vocab_size, "checkpoint vocabulary has ",
              m.vocab.size(), " entries, config says ", m.config.encoder.vocab_size);
  const ParamStore expected = init_encoder_params(m.config.encoder, 0);
  for (const auto& [name, t] : expected.params()) {
    auto it = ckpt.tensors.find(name);
    SGSUM_CHECK(it != ckpt.tensors.end(), "checkpoint is missing parameter '", name, "'");
    SGSUM_CHECK(it->second.shape() == t.shape(), "checkpoint parameter '", name, "' has shape ",
                it->second.shape_str(), ", expected ", t.shape_str());
    m.params.add(name, it->second);
  }
  SGSUM_CHECK(ckpt.tensors.size() == expected.params().size(), "checkpoint has ",
              ckpt.tensors.size(), " tensors, model expects ", expected.params().size());
  return m;
}

}  // namespace sgsum
