#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgsum/autodiff.hpp"
#include "sgsum/checkpoint.hpp"
#include "sgsum/config.hpp"
#include "sgsum/corpus.hpp"
#include "sgsum/model.hpp"
#include "sgsum/optim.hpp"
#include "sgsum/rouge.hpp"

namespace sgsum {

struct StepLog {
  std::size_t step = 0;  // 1-based
  std::size_t epoch = 0;
  std::string cluster_id;
  double sent = 0.0;
  double pairwise = 0.0;
  double global = 0.0;
  double total = 0.0;
  double grad_norm = 0.0;
};

struct TrainResult {
  Model model;          // best-on-validation parameters
  Model final_model;    // parameters after the last step
  std::vector<StepLog> steps;
  std::vector<double> validation_f1;  // per epoch
  std::size_t best_epoch = 0;         // 0 = initialization
  std::vector<std::string> warnings;
};

// Summary for every cluster, as selected sentence indices.
inline std::vector<SelectedSummary> summarize_clusters(const Model& model,
                                                       const std::vector<Cluster>& clusters) {
  std::optional<TfIdfModel> global;
  if (model.config.tfidf_scope == TfIdfScope::kGlobal) global = fit_global_tfidf(clusters);
  std::vector<SelectedSummary> out;
  out.reserve(clusters.size());
  for (const Cluster& c : clusters) {
    out.push_back(select_for_cluster(model.params, model.config, model.vocab, c,
                                     global ? &*global : nullptr));
  }
  return out;
}

inline RougeScore corpus_rouge2(const Model& model, const std::vector<Cluster>& clusters) {
  const std::vector<SelectedSummary> selected = summarize_clusters(model, clusters);
  RougeCounts total;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (!clusters[i].has_reference()) continue;
    total += rouge_counts(concat_tokens(clusters[i], selected[i].members), clusters[i].reference, 2);
  }
  return score_from_counts(total);
}

// One optimizer step on one cluster. Returns the loss parts measured in the
// forward pass that produced the gradients.
inline StepLog train_step(ParamStore& store, const RunConfig& cfg, const TrainingExample& ex,
                          std::uint64_t step, std::vector<std::string>* warnings = nullptr) {
  Tape tape;
  Forward f{tape, store, cfg.encoder, Mode::kTrain, DropoutStream{cfg.seed, step}};
  ForwardOutputs fwd;
  try {
    fwd = compute_loss(f, ex, cfg.gamma0);
  } catch (const Error& e) {
    detail::fail("training step ", step, " on cluster '", ex.cluster_id,
                 "' failed in the forward pass: ", e.what());
  }
  StepLog log;
  log.step = step;
  log.cluster_id = ex.cluster_id;
  log.sent = fwd.loss.sent.value().item();
  log.pairwise = fwd.loss.pairwise.value().item();
  log.global = fwd.loss.global.value().item();
  log.total = fwd.loss.total.value().item();
  SGSUM_CHECK(std::isfinite(log.total), "non-finite loss at step ", step, " on cluster '",
              ex.cluster_id, "': sent=", log.sent, " pairwise=", log.pairwise,
              " global=", log.global);
  Gradients grads = tape.backward(fwd.loss.total, store);
  log.grad_norm = clip_global_norm(grads, cfg.clip_norm);
  adam_step(store, grads, cfg.adam);
  if (warnings) warnings->insert(warnings->end(), f.warnings.begin(), f.warnings.end());
  return log;
}

// One cluster per optimizer step; an epoch is a seeded shuffle of the
// training clusters. After each epoch the model is scored on the validation
// clusters (micro ROUGE-2 F1) and the best one is kept. Without validation
// data the last epoch wins.
inline TrainResult train(RunConfig cfg, const std::vector<Cluster>& train_clusters,
                         const std::vector<Cluster>& val_clusters, std::ostream* log = nullptr) {
  TrainResult result;
  Vocabulary vocab = Vocabulary::build(train_clusters);
  cfg.encoder.vocab_size = vocab.size();
  cfg.validate();

  std::optional<TfIdfModel> global;
  if (cfg.tfidf_scope == TfIdfScope::kGlobal) global = fit_global_tfidf(train_clusters);

  std::vector<TrainingExample> examples;
  for (const Cluster& c : train_clusters) {
    if (!c.has_reference()) {
      result.warnings.push_back("skipping training cluster '" + c.id + "' without a summary");
      continue;
    }
    if (c.size() == 0) {
      result.warnings.push_back("skipping training cluster '" + c.id + "' without sentences");
      continue;
    }
    examples.push_back(make_training_example(c, vocab, cfg, global ? &*global : nullptr));
  }
  SGSUM_CHECK(cfg.epochs == 0 || !examples.empty(), "no usable training clusters");

  Model current{cfg, vocab, init_encoder_params(cfg.encoder, cfg.seed)};
  result.model = current;
  double best_f1 = -1.0;

  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = Rng::derive(cfg.seed, {0x5348554646ULL, epoch});
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
    for (std::size_t idx : order) {
      StepLog s = train_step(current.params, cfg, examples[idx], ++step, &result.warnings);
      s.epoch = epoch;
      if (log) {
        *log << "epoch " << epoch << " step " << s.step << " cluster " << s.cluster_id
             << std::setprecision(6) << " loss " << s.total << " (sent " << s.sent
             << ", pairwise " << s.pairwise << ", global " << s.global << ") grad_norm "
             << s.grad_norm << '\n';
      }
      result.steps.push_back(std::move(s));
    }
    double f1 = 0.0;
    if (!val_clusters.empty()) {
      f1 = corpus_rouge2(current, val_clusters).f1;
      if (log) *log << "epoch " << epoch << " validation ROUGE-2 F1 " << f1 << '\n';
    }
    result.validation_f1.push_back(f1);
    if (val_clusters.empty() || f1 > best_f1) {
      best_f1 = f1;
      result.model = current;
      result.best_epoch = epoch;
    }
  }
  result.final_model = std::move(current);
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalRow {
  std::string cluster_id;
  RougeCounts counts;
  RougeScore score;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  RougeScore micro;
  RougeScore macro;
};

// Scores predictions (cluster_id -> summary text) against reference
// summaries. Every id must appear on both sides.
inline EvalReport evaluate(const std::map<std::string, std::string>& predictions,
                           const std::vector<ClusterRecord>& references) {
  std::map<std::string, const ClusterRecord*> refs;
  for (const auto& r : references) {
    SGSUM_CHECK(r.summary.has_value(), "reference cluster '", r.cluster_id, "' has no summary");
    SGSUM_CHECK(refs.emplace(r.cluster_id, &r).second, "duplicate reference id '", r.cluster_id, "'");
  }
  std::vector<std::string> unmatched;
  for (const auto& [id, text] : predictions) {
    if (!refs.count(id)) unmatched.push_back("prediction without reference: " + id);
  }
  for (const auto& [id, rec] : refs) {
    if (!predictions.count(id)) unmatched.push_back("reference without prediction: " + id);
  }
  if (!unmatched.empty()) {
    std::ostringstream os;
    os << "cluster ids do not match:";
    for (const auto& u : unmatched) os << "\n  " << u;
    throw Error(os.str());
  }
  SGSUM_CHECK(!refs.empty(), "evaluate: no clusters");
  EvalReport report;
  RougeCounts total;
  double p = 0.0, r = 0.0, f = 0.0;
  for (const auto& [id, rec] : refs) {
    EvalRow row;
    row.cluster_id = id;
    row.counts = rouge_counts(tokenize(predictions.at(id)), tokenize(*rec->summary), 2);
    row.score = score_from_counts(row.counts);
    total += row.counts;
    p += row.score.precision;
    r += row.score.recall;
    f += row.score.f1;
    report.rows.push_back(std::move(row));
  }
  const double n = static_cast<double>(report.rows.size());
  report.micro = score_from_counts(total);
  report.macro = RougeScore{p / n, r / n, f / n};
  return report;
}

inline nlohmann::ordered_json to_json(const EvalReport& report) {
  auto score = [](const RougeScore& s) {
    return nlohmann::ordered_json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  };
  nlohmann::ordered_json j;
  j["metric"] = "rouge-2";
  j["micro"] = score(report.micro);
  j["macro"] = score(report.macro);
  j["clusters"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json c = score(row.score);
    c["cluster_id"] = row.cluster_id;
    c["matched"] = row.counts.matched;
    c["predicted"] = row.counts.predicted;
    c["reference"] = row.counts.reference;
    j["clusters"].push_back(std::move(c));
  }
  return j;
}

inline void print_table(std::ostream& os, const EvalReport& report) {
  os << std::left << std::setw(24) << "cluster" << std::right << std::setw(10) << "R-2 P"
     << std::setw(10) << "R-2 R" << std::setw(10) << "R-2 F1" << '\n';
  os << std::fixed << std::setprecision(4);
  for (const auto& row : report.rows) {
    os << std::left << std::setw(24) << row.cluster_id << std::right << std::setw(10)
       << row.score.precision << std::setw(10) << row.score.recall << std::setw(10)
       << row.score.f1 << '\n';
  }
  os << std::left << std::setw(24) << "micro" << std::right << std::setw(10)
     << report.micro.precision << std::setw(10) << report.micro.recall << std::setw(10)
     << report.micro.f1 << '\n';
  os << std::left << std::setw(24) << "macro" << std::right << std::setw(10)
     << report.macro.precision << std::setw(10) << report.macro.recall << std::setw(10)
     << report.macro.f1 << '\n';
  os.unsetf(std::ios::fixed);
}

// ---------------------------------------------------------------------------
// Theta/beta sweep

struct SweepRow {
  double theta = 0.0;
  double beta = 0.0;
  RougeScore rouge2;
  bool best = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

// The seven (theta, beta) settings of the published comparison, in its order.
inline std::vector<std::pair<double, double>> paper_sweep_grid() {
  return {{0.5, 0.5}, {0.6, 0.4}, {0.7, 0.3}, {0.8, 0.2}, {1.0, 0.0}, {0.9, 0.1}, {0.85, 0.15}};
}

// Trains each grid point from scratch with the same seed and scores it on the
// validation clusters (the training clusters when there is no validation
// split). The row with the highest F1 is flagged; ties go to the earlier row.
inline SweepResult sweep(const RunConfig& base, const std::vector<std::pair<double, double>>& grid,
                         const std::vector<Cluster>& train_clusters,
                         const std::vector<Cluster>& val_clusters, std::ostream* log = nullptr) {
  SGSUM_CHECK(!grid.empty(), "sweep: empty grid");
  const std::vector<Cluster>& eval_set = val_clusters.empty() ? train_clusters : val_clusters;
  SweepResult result;
  for (const auto& [theta, beta] : grid) {
    RunConfig cfg = base;
    cfg.encoder.theta = theta;
    cfg.encoder.beta = beta;
    const TrainResult trained = train(cfg, train_clusters, val_clusters);
    SweepRow row{theta, beta, corpus_rouge2(trained.model, eval_set), false};
    if (log) *log << "theta " << theta << " beta " << beta << " ROUGE-2 F1 " << row.rouge2.f1 << '\n';
    result.rows.push_back(row);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].rouge2.f1 > result.rows[best].rouge2.f1) best = i;
  }
  result.rows[best].best = true;
  return result;
}

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> kColumns = {"theta", "beta", "R-2 P", "R-2 R", "R-2 F1",
                                                    "best"};
  return kColumns;
}

inline nlohmann::ordered_json to_json(const SweepResult& s) {
  nlohmann::ordered_json j;
  j["columns"] = sweep_columns();
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : s.rows) {
    j["rows"].push_back({{"theta", r.theta},
                         {"beta", r.beta},
                         {"precision", r.rouge2.precision},
                         {"recall", r.rouge2.recall},
                         {"f1", r.rouge2.f1},
                         {"best", r.best}});
  }
  return j;
}

inline void print_table(std::ostream& os, const SweepResult& s) {
  const auto& cols = sweep_columns();
  for (const auto& c : cols) os << std::setw(9) << c;
  os << '\n' << std::fixed;
  for (const auto& r : s.rows) {
    os << std::setprecision(2) << std::setw(9) << r.theta << std::setw(9) << r.beta
       << std::setprecision(4) << std::setw(9) << r.rouge2.precision << std::setw(9)
       << r.rouge2.recall << std::setw(9) << r.rouge2.f1 << std::setw(9) << (r.best ? "*" : "")
       << '\n';
  }
  os.unsetf(std::ios::fixed);
}

}  // namespace sgsum
