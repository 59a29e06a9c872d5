#pragma once

// Candidate sub-graph construction, oracle extraction, the training losses
// and inference-time selection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgsum/autodiff.hpp"
#include "sgsum/corpus.hpp"
#include "sgsum/error.hpp"
#include "sgsum/rouge.hpp"
#include "sgsum/tensor.hpp"

namespace sgsum {

inline constexpr std::size_t kMaxCandidates = 20000;

struct CandidateSummary {
  std::vector<std::size_t> members;  // sorted sentence indices
  double rouge_rank_score = 0.0;
};

struct OracleSummary {
  std::vector<std::size_t> members;
  double score = 0.0;
  std::vector<double> trajectory;  // objective after each accepted pick
};

// What "ROUGE score" means when extracting oracles and ranking candidates.
enum class OracleObjective {
  kMeanRouge12,  // (ROUGE-1 F1 + ROUGE-2 F1) / 2
  kRouge2,
};

inline std::string to_string(OracleObjective o) {
  return o == OracleObjective::kMeanRouge12 ? "mean_rouge_1_2" : "rouge_2";
}

inline OracleObjective parse_oracle_objective(std::string_view s) {
  if (s == "mean_rouge_1_2") return OracleObjective::kMeanRouge12;
  if (s == "rouge_2") return OracleObjective::kRouge2;
  detail::fail("unknown oracle_objective '", s, "' (expected mean_rouge_1_2|rouge_2)");
}

inline double oracle_objective(const Tokens& pred, const Tokens& ref, OracleObjective kind) {
  const double r2 = rouge_n(pred, ref, 2).f1;
  if (kind == OracleObjective::kRouge2) return r2;
  return 0.5 * (rouge_n(pred, ref, 1).f1 + r2);
}

// (ROUGE-2 F1, ROUGE-1 F1) per sentence; compared lexicographically.
using SentenceRouge = std::pair<double, double>;

inline std::vector<SentenceRouge> sentence_rouge_ranking(const Cluster& cluster,
                                                         const Tokens& reference) {
  SGSUM_CHECK(!reference.empty(), "sentence_rouge_ranking: empty reference");
  std::vector<SentenceRouge> out;
  out.reserve(cluster.size());
  for (const Sentence& s : cluster.sentences) {
    out.emplace_back(rouge_n(s.tokens, reference, 2).f1, rouge_n(s.tokens, reference, 1).f1);
  }
  return out;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Indices of the top-k scores, highest first; equal scores keep the lower
// index first.
template <typename Score>
std::vector<std::size_t> top_k_indices(std::span<const Score> scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[b] < scores[a]; });
  order.resize(std::min(k, order.size()));
  return order;
}

// Every subset of each requested size drawn from the top-K sentences, in
// lexicographic order of the (sorted) member lists.
template <typename Score>
std::vector<CandidateSummary> generate_candidates(std::span<const Score> scores, std::size_t k,
                                                  std::span<const std::size_t> sizes) {
  SGSUM_CHECK(!sizes.empty(), "generate_candidates: no candidate sizes");
  const std::size_t min_size = *std::min_element(sizes.begin(), sizes.end());
  const std::size_t max_size = *std::max_element(sizes.begin(), sizes.end());
  SGSUM_CHECK(min_size >= 1, "generate_candidates: candidate sizes must be >= 1");
  SGSUM_CHECK(k >= max_size, "generate_candidates: K (", k, ") must be >= largest size (",
              max_size, ")");
  SGSUM_CHECK(scores.size() >= min_size, "generate_candidates: cluster has ", scores.size(),
              " sentences, fewer than the smallest candidate size ", min_size);

  std::vector<std::size_t> top = top_k_indices(scores, k);
  std::sort(top.begin(), top.end());
  std::vector<std::size_t> unique_sizes(sizes.begin(), sizes.end());
  std::sort(unique_sizes.begin(), unique_sizes.end());
  unique_sizes.erase(std::unique(unique_sizes.begin(), unique_sizes.end()), unique_sizes.end());

  std::size_t total = 0;
  for (std::size_t m : unique_sizes) total += binomial(top.size(), m);
  SGSUM_CHECK(total <= kMaxCandidates, "generate_candidates: ", total,
              " candidates exceed the cap of ", kMaxCandidates, "; lower K or the sizes");

  std::vector<CandidateSummary> out;
  out.reserve(total);
  for (std::size_t m : unique_sizes) {
    if (m > top.size()) continue;
    std::vector<std::size_t> pick(m);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    while (true) {
      CandidateSummary c;
      for (std::size_t p : pick) c.members.push_back(top[p]);
      out.push_back(std::move(c));
      // Advance to the next m-combination of positions.
      std::size_t i = m;
      while (i > 0 && pick[i - 1] == top.size() - m + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  std::sort(out.begin(), out.end(), [](const CandidateSummary& a, const CandidateSummary& b) {
    return a.members < b.members;
  });
  return out;
}

// Candidate sizes clipped to the cluster size, deduplicated.
inline std::vector<std::size_t> effective_sizes(std::span<const std::size_t> sizes,
                                                std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t m : sizes) out.push_back(std::min(m, n));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Greedy extraction: repeatedly add the sentence with the largest objective
// gain; stop when nothing strictly improves or the size limit is hit. The
// first pick is always taken, so the oracle is never empty; ties go to the
// lower sentence index.
inline OracleSummary greedy_oracle(const Cluster& cluster, const Tokens& reference,
                                   std::size_t max_sentences,
                                   OracleObjective kind = OracleObjective::kMeanRouge12) {
  SGSUM_CHECK(!reference.empty(), "greedy_oracle: empty reference");
  SGSUM_CHECK(max_sentences >= 1, "greedy_oracle: max_sentences must be >= 1");
  SGSUM_CHECK(cluster.size() > 0, "greedy_oracle: empty cluster");
  OracleSummary oracle;
  std::vector<bool> used(cluster.size(), false);
  while (oracle.members.size() < max_sentences) {
    std::size_t best = cluster.size();
    double best_score = 0.0;
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      if (used[i]) continue;
      std::vector<std::size_t> trial = oracle.members;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), i), i);
      const double s = oracle_objective(concat_tokens(cluster, trial), reference, kind);
      if (best == cluster.size() || s > best_score) {
        best = i;
        best_score = s;
      }
    }
    if (best == cluster.size()) break;
    if (!oracle.members.empty() && !(best_score > oracle.score)) break;
    used[best] = true;
    oracle.members.insert(std::upper_bound(oracle.members.begin(), oracle.members.end(), best),
                          best);
    oracle.score = best_score;
    oracle.trajectory.push_back(best_score);
  }
  return oracle;
}

inline std::vector<int> oracle_labels(std::size_t n, const std::vector<std::size_t>& members) {
  std::vector<int> y(n, 0);
  for (std::size_t m : members) y.at(m) = 1;
  return y;
}

// Mean over candidate pairs i < j (list sorted best-first) of
//   max(0, cos(C_j, C*) - cos(C_i, C*) + gamma0 * (j - i)).
inline Var loss_pairwise(std::span<const Var> candidates, const Var& gold, double gamma0,
                         std::vector<std::string>* warnings = nullptr) {
  Tape& tape = *gold.tape();
  if (candidates.size() < 2) {
    if (warnings) warnings->push_back("loss_pairwise: fewer than 2 candidates, loss is 0");
    return tape.constant(Tensor::scalar(0.0));
  }
  std::vector<Var> cos;
  cos.reserve(candidates.size());
  for (const Var& c : candidates) cos.push_back(cosine_similarity(c, gold));
  std::vector<Var> hinges;
  for (std::size_t i = 0; i < cos.size(); ++i) {
    for (std::size_t j = i + 1; j < cos.size(); ++j) {
      const double margin = gamma0 * static_cast<double>(j - i);
      hinges.push_back(relu(add_scalar(sub(cos[j], cos[i]), margin)));
    }
  }
  return scale(sum(concat_cols(hinges)), 1.0 / static_cast<double>(hinges.size()));
}

// 1 - cos(D, C*)
inline Var loss_global(const Var& document, const Var& gold) {
  return add_scalar(scale(cosine_similarity(document, gold), -1.0), 1.0);
}

inline constexpr double kBceClamp = 1e-7;

// Summed binary cross-entropy; predictions clamped to [1e-7, 1 - 1e-7].
inline Var loss_sent(const Var& y_hat, const std::vector<int>& y) {
  SGSUM_CHECK(y_hat.value().size() == y.size(), "loss_sent: ", y_hat.value().size(),
              " predictions for ", y.size(), " labels");
  Tape& tape = *y_hat.tape();
  Tensor pos = Tensor::matrix(y_hat.rows(), y_hat.cols());
  Tensor neg = Tensor::matrix(y_hat.rows(), y_hat.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    SGSUM_CHECK(y[i] == 0 || y[i] == 1, "loss_sent: label ", y[i], " is not 0/1");
    pos[i] = y[i];
    neg[i] = 1 - y[i];
  }
  Var p = clamp(y_hat, kBceClamp, 1.0 - kBceClamp);
  Var log_p = log(p);
  Var log_q = log(add_scalar(scale(p, -1.0), 1.0));
  Var ll = add(mul(log_p, tape.constant(std::move(pos))), mul(log_q, tape.constant(std::move(neg))));
  return scale(sum(ll), -1.0);
}

struct LossParts {
  Var sent;
  Var pairwise;
  Var global;
  Var total;
};

inline Var total_loss(const Var& sent, const Var& pairwise, const Var& global) {
  return add(add(sent, pairwise), global);
}

// Index of the candidate whose representation is closest in cosine to D.
// Ties go to the lexicographically smallest member set.
inline std::size_t select_summary(std::span<const CandidateSummary> candidates,
                                  std::span<const Tensor> reprs, const Tensor& document) {
  SGSUM_CHECK(!candidates.empty(), "select_summary: no candidates");
  SGSUM_CHECK(candidates.size() == reprs.size(), "select_summary: ", candidates.size(),
              " candidates but ", reprs.size(), " representations");
  std::size_t best = 0;
  double best_cos = cosine_dense(reprs[0].data(), document.data());
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double c = cosine_dense(reprs[i].data(), document.data());
    if (c > best_cos || (c == best_cos && candidates[i].members < candidates[best].members)) {
      best = i;
      best_cos = c;
    }
  }
  return best;
}

}  // namespace sgsum
