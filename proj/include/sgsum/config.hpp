#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgsum/encoder.hpp"
#include "sgsum/error.hpp"
#include "sgsum/graph.hpp"
#include "sgsum/optim.hpp"
#include "sgsum/ranking.hpp"

namespace sgsum {

enum class TfIdfScope { kCluster, kGlobal };

inline std::string to_string(TfIdfScope s) { return s == TfIdfScope::kCluster ? "cluster" : "global"; }

inline TfIdfScope parse_tfidf_scope(std::string_view s) {
  if (s == "cluster") return TfIdfScope::kCluster;
  if (s == "global") return TfIdfScope::kGlobal;
  detail::fail("unknown tfidf_scope '", s, "' (expected cluster|global)");
}

struct RunConfig {
  EncoderConfig encoder;
  AdamConfig adam;
  double clip_norm = 2.0;
  std::size_t epochs = 5;
  std::uint64_t seed = 42;
  std::size_t top_k = 10;
  std::vector<std::size_t> candidate_sizes = {9};
  double gamma0 = 0.01;
  std::size_t max_oracle_sentences = 9;
  OracleObjective oracle_objective = OracleObjective::kMeanRouge12;
  BiasForm bias_form = BiasForm::kPaper;
  TfIdfScope tfidf_scope = TfIdfScope::kCluster;

  std::string data_path;
  std::string val_data_path;
  std::string checkpoint_path;
  std::string out_path;
  std::string report_path;

  std::vector<std::string> violations() const {
    std::vector<std::string> out = encoder.violations();
    auto require = [&](bool ok, std::string msg) {
      if (!ok) out.push_back(std::move(msg));
    };
    require(adam.lr > 0.0, "config key 'lr' must be positive");
    require(adam.beta1 >= 0.0 && adam.beta1 < 1.0, "config key 'beta1' must be in [0, 1)");
    require(adam.beta2 >= 0.0 && adam.beta2 < 1.0, "config key 'beta2' must be in [0, 1)");
    require(adam.eps > 0.0, "config key 'eps' must be positive");
    require(clip_norm > 0.0, "config key 'clip_norm' must be positive");
    require(top_k >= 1, "config key 'top_k' must be >= 1");
    require(!candidate_sizes.empty(), "config key 'candidate_sizes' must be non-empty");
    bool sizes_ok = !candidate_sizes.empty();
    for (std::size_t m : candidate_sizes) {
      if (m < 1 || m > top_k) {
        sizes_ok = false;
        out.push_back("config key 'candidate_sizes': size " + std::to_string(m) +
                      " must be in [1, top_k]");
      }
    }
    if (sizes_ok) {
      std::size_t total = 0;
      for (std::size_t m : candidate_sizes) total += binomial(top_k, m);
      require(total <= kMaxCandidates, "config keys 'top_k'/'candidate_sizes' allow " +
                                           std::to_string(total) + " candidates, above the cap of " +
                                           std::to_string(kMaxCandidates));
    }
    require(gamma0 >= 0.0, "config key 'gamma0' must be >= 0");
    require(max_oracle_sentences >= 1, "config key 'max_oracle_sentences' must be >= 1");
    return out;
  }

  void validate() const { detail::throw_violations(violations()); }
};

// Defaults from the published training setup.
inline RunConfig paper_profile() { return RunConfig{}; }

// Small model used by the test suites and demos.
inline RunConfig toy_profile() {
  RunConfig c;
  c.encoder.hidden = 8;
  c.encoder.ffn = 16;
  c.encoder.heads = 2;
  c.encoder.token_layers = 1;
  c.encoder.graph_layers = 1;
  c.encoder.max_tokens_per_doc = 128;
  c.encoder.max_sentences = 32;
  c.adam.lr = 3e-3;
  c.top_k = 6;
  c.candidate_sizes = {2, 3};
  c.max_oracle_sentences = 3;
  return c;
}

inline RunConfig profile(std::string_view name) {
  if (name == "paper") return paper_profile();
  if (name == "toy") return toy_profile();
  detail::fail("unknown profile '", name, "' (expected paper|toy)");
}

// Model-shaping keys only; paths are excluded so the snapshot embedded in a
// checkpoint does not depend on where files live.
inline nlohmann::ordered_json model_json(const RunConfig& c) {
  const EncoderConfig& e = c.encoder;
  nlohmann::ordered_json j;
  j["vocab_size"] = e.vocab_size;
  j["hidden"] = e.hidden;
  j["ffn"] = e.ffn;
  j["heads"] = e.heads;
  j["token_layers"] = e.token_layers;
  j["graph_layers"] = e.graph_layers;
  j["theta"] = e.theta;
  j["beta"] = e.beta;
  j["sigma"] = e.sigma;
  j["dropout"] = e.dropout;
  j["layer_norm_eps"] = e.layer_norm_eps;
  j["max_tokens_per_doc"] = e.max_tokens_per_doc;
  j["max_sentences"] = e.max_sentences;
  j["max_documents"] = e.max_documents;
  j["position_embeddings"] = e.position_embeddings;
  j["tie_subgraph"] = e.tie_subgraph;
  j["lr"] = c.adam.lr;
  j["beta1"] = c.adam.beta1;
  j["beta2"] = c.adam.beta2;
  j["eps"] = c.adam.eps;
  j["clip_norm"] = c.clip_norm;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["top_k"] = c.top_k;
  j["candidate_sizes"] = c.candidate_sizes;
  j["gamma0"] = c.gamma0;
  j["max_oracle_sentences"] = c.max_oracle_sentences;
  j["oracle_objective"] = to_string(c.oracle_objective);
  j["bias_form"] = to_string(c.bias_form);
  j["tfidf_scope"] = to_string(c.tfidf_scope);
  return j;
}

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j = model_json(c);
  j["data"] = c.data_path;
  j["val_data"] = c.val_data_path;
  j["checkpoint"] = c.checkpoint_path;
  j["out"] = c.out_path;
  j["report"] = c.report_path;
  return j;
}

namespace detail {

template <typename T>
void read_key(const nlohmann::ordered_json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail("config key '", key, "': ", e.what());
  }
}

template <typename E>
void read_enum(const nlohmann::ordered_json& j, const char* key, E& out,
               E (*parse)(std::string_view)) {
  std::string s;
  read_key(j, key, s);
  if (j.contains(key)) {
    try {
      out = parse(s);
    } catch (const Error& e) {
      fail("config key '", key, "': ", e.what());
    }
  }
}

}  // namespace detail

// Overlays `j` on `base`. Unknown keys are errors.
inline RunConfig apply_json(RunConfig c, const nlohmann::ordered_json& j) {
  SGSUM_CHECK(j.is_object(), "config must be a JSON object");
  const nlohmann::ordered_json known = to_json(c);
  for (const auto& [key, value] : j.items()) {
    SGSUM_CHECK(known.contains(key), "unknown config key '", key, "'");
  }
  EncoderConfig& e = c.encoder;
  detail::read_key(j, "vocab_size", e.vocab_size);
  detail::read_key(j, "hidden", e.hidden);
  detail::read_key(j, "ffn", e.ffn);
  detail::read_key(j, "heads", e.heads);
  detail::read_key(j, "token_layers", e.token_layers);
  detail::read_key(j, "graph_layers", e.graph_layers);
  detail::read_key(j, "theta", e.theta);
  detail::read_key(j, "beta", e.beta);
  detail::read_key(j, "sigma", e.sigma);
  detail::read_key(j, "dropout", e.dropout);
  detail::read_key(j, "layer_norm_eps", e.layer_norm_eps);
  detail::read_key(j, "max_tokens_per_doc", e.max_tokens_per_doc);
  detail::read_key(j, "max_sentences", e.max_sentences);
  detail::read_key(j, "max_documents", e.max_documents);
  detail::read_key(j, "position_embeddings", e.position_embeddings);
  detail::read_key(j, "tie_subgraph", e.tie_subgraph);
  detail::read_key(j, "lr", c.adam.lr);
  detail::read_key(j, "beta1", c.adam.beta1);
  detail::read_key(j, "beta2", c.adam.beta2);
  detail::read_key(j, "eps", c.adam.eps);
  detail::read_key(j, "clip_norm", c.clip_norm);
  detail::read_key(j, "epochs", c.epochs);
  detail::read_key(j, "seed", c.seed);
  detail::read_key(j, "top_k", c.top_k);
  detail::read_key(j, "candidate_sizes", c.candidate_sizes);
  detail::read_key(j, "gamma0", c.gamma0);
  detail::read_key(j, "max_oracle_sentences", c.max_oracle_sentences);
  detail::read_enum(j, "oracle_objective", c.oracle_objective, &parse_oracle_objective);
  detail::read_enum(j, "bias_form", c.bias_form, &parse_bias_form);
  detail::read_enum(j, "tfidf_scope", c.tfidf_scope, &parse_tfidf_scope);
  detail::read_key(j, "data", c.data_path);
  detail::read_key(j, "val_data", c.val_data_path);
  detail::read_key(j, "checkpoint", c.checkpoint_path);
  detail::read_key(j, "out", c.out_path);
  detail::read_key(j, "report", c.report_path);
  return c;
}

// `key=value`; the value is parsed as JSON when possible, else taken as a
// string, so both `theta=0.5` and `bias_form=paper` work.
inline RunConfig apply_override(RunConfig c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  SGSUM_CHECK(eq != std::string_view::npos && eq > 0, "override '", assignment,
              "' is not of the form key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  nlohmann::ordered_json value = nlohmann::ordered_json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  nlohmann::ordered_json j;
  j[key] = value;
  return apply_json(std::move(c), j);
}

}  // namespace sgsum
