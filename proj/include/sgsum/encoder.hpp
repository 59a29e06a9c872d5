#pragma once

// Hierarchical graph encoder.
//
//   tokens --(embedding + sinusoidal positions)--> shared token transformer,
//   one document at a time --> mean over each sentence's token vectors
//   (+ sentence/document position embeddings) = sentence base vectors
//   --> graph attention layers over all cluster sentences = X
//
// Graph attention adds theta * R + beta * R' to the scaled dot-product
// logits before the softmax. Candidate sub-graphs re-run graph attention on
// the induced sub-graph of the base vectors, then pool to one vector.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgsum/autodiff.hpp"
#include "sgsum/corpus.hpp"
#include "sgsum/error.hpp"
#include "sgsum/graph.hpp"
#include "sgsum/params.hpp"
#include "sgsum/rng.hpp"
#include "sgsum/tensor.hpp"

namespace sgsum {

struct EncoderConfig {
  std::size_t vocab_size = 1;
  std::size_t hidden = 256;
  std::size_t ffn = 1024;
  std::size_t heads = 8;
  std::size_t token_layers = 6;
  std::size_t graph_layers = 2;
  double theta = 0.85;
  double beta = 0.15;
  double sigma = 1.0;
  double dropout = 0.1;
  double layer_norm_eps = 1e-6;
  std::size_t max_tokens_per_doc = 512;
  std::size_t max_sentences = 64;
  std::size_t max_documents = 16;
  bool position_embeddings = true;
  bool tie_subgraph = false;

  // One message per violated constraint, each naming its key.
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    const std::pair<const char*, std::size_t> sizes[] = {
        {"vocab_size", vocab_size},       {"hidden", hidden},
        {"ffn", ffn},                     {"heads", heads},
        {"token_layers", token_layers},   {"graph_layers", graph_layers},
        {"max_tokens_per_doc", max_tokens_per_doc}, {"max_sentences", max_sentences},
        {"max_documents", max_documents}};
    for (const auto& [key, value] : sizes) {
      if (value < 1) out.push_back(std::string("config key '") + key + "' must be >= 1");
    }
    if (heads >= 1 && hidden % heads != 0) {
      out.push_back("config keys 'hidden'/'heads': hidden (" + std::to_string(hidden) +
                    ") must be divisible by heads (" + std::to_string(heads) + ")");
    }
    if (!(theta >= 0.0)) out.push_back("config key 'theta' must be >= 0");
    if (!(beta >= 0.0)) out.push_back("config key 'beta' must be >= 0");
    if (!(sigma > 0.0)) out.push_back("config key 'sigma' must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) out.push_back("config key 'dropout' must be in [0, 1)");
    if (!(layer_norm_eps > 0.0)) out.push_back("config key 'layer_norm_eps' must be positive");
    return out;
  }

  void validate() const { detail::throw_violations(violations()); }
};

// Token -> embedding row. Row 0 is reserved for unknown tokens.
class Vocabulary {
 public:
  static constexpr std::size_t kUnknown = 0;

  Vocabulary() { tokens_.push_back("<unk>"); }

  std::size_t add(const std::string& token) {
    auto [it, inserted] = index_.try_emplace(token, tokens_.size());
    if (inserted) tokens_.push_back(token);
    return it->second;
  }

  std::size_t id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnknown : it->second;
  }

  std::size_t size() const { return tokens_.size(); }

  static Vocabulary build(const std::vector<Cluster>& clusters) {
    Vocabulary v;
    for (const Cluster& c : clusters) {
      for (const Sentence& s : c.sentences) {
        for (const std::string& t : s.tokens) v.add(t);
      }
    }
    return v;
  }

  // One token per line, row order.
  std::string serialize() const {
    std::string out;
    for (std::size_t i = 1; i < tokens_.size(); ++i) {
      out += tokens_[i];
      out += '\n';
    }
    return out;
  }

  static Vocabulary deserialize(const std::string& text) {
    Vocabulary v;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      v.add(text.substr(start, end - start));
      start = end + 1;
    }
    return v;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Everything the encoder reads about one cluster. Sentences are ordered
// document-major, matching Cluster::sentences.
struct EncoderInput {
  std::vector<std::vector<std::vector<std::size_t>>> documents;  // doc -> sentence -> token ids
  std::vector<std::size_t> doc_of;
  std::vector<std::size_t> sent_index;
  BiasMatrices bias;

  std::size_t num_sentences() const { return doc_of.size(); }
};

inline EncoderInput make_encoder_input(const Cluster& cluster, const Vocabulary& vocab,
                                       BiasMatrices bias) {
  EncoderInput in;
  in.documents.resize(cluster.num_documents);
  for (const Sentence& s : cluster.sentences) {
    std::vector<std::size_t> ids;
    ids.reserve(s.tokens.size());
    for (const std::string& t : s.tokens) ids.push_back(vocab.id(t));
    in.documents.at(s.doc_index).push_back(std::move(ids));
    in.doc_of.push_back(s.doc_index);
    in.sent_index.push_back(s.sent_index);
  }
  in.bias = std::move(bias);
  return in;
}

// Dropout masks are a pure function of (seed, step, site).
struct DropoutStream {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::uint64_t site = 0;

  Rng next() { return Rng::derive(seed, {step, site++}); }
};

// Shared state of one forward pass.
struct Forward {
  Tape& tape;
  const ParamStore& store;
  const EncoderConfig& cfg;
  Mode mode = Mode::kEval;
  DropoutStream dropout{};
  std::vector<std::string> warnings{};

  Var param(const std::string& name) { return tape.param(store, name); }

  Var drop(const Var& x) {
    if (mode == Mode::kEval || cfg.dropout == 0.0) return x;
    Rng rng = dropout.next();
    return sgsum::dropout(x, cfg.dropout, mode, rng);
  }
};

// Optional capture of attention distributions for inspection.
struct AttentionProbe {
  std::vector<Tensor> weights;  // one [n, n] matrix per head per layer
};

struct PoolProbe {
  std::vector<Tensor> weights;  // per head, [1, n]
  Tensor values;                // value-projected rows [n, hidden]
  std::vector<Tensor> pooled;   // per head, [1, hidden / heads], before projection
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline Tensor normal_tensor(std::vector<std::size_t> shape, double stddev, Rng rng) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.normal(0.0, stddev);
  return t;
}

inline Tensor uniform_tensor(std::vector<std::size_t> shape, double bound, Rng rng) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

inline void add_linear(ParamStore& store, const std::string& name, std::size_t in,
                       std::size_t out, bool with_bias, std::uint64_t seed) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  store.add(name + ".weight",
            uniform_tensor({in, out}, bound, Rng::derive(seed, {fnv1a(name + ".weight")})));
  if (with_bias) store.add(name + ".bias", Tensor({out}));
}

inline void add_layer_norm(ParamStore& store, const std::string& name, std::size_t width) {
  store.add(name + ".gain", Tensor({width}, 1.0));
  store.add(name + ".bias", Tensor({width}));
}

inline void add_block(ParamStore& store, const std::string& prefix, const EncoderConfig& cfg,
                      std::uint64_t seed) {
  const std::size_t h = cfg.hidden;
  add_layer_norm(store, prefix + ".ln1", h);
  add_linear(store, prefix + ".attn.q", h, h, true, seed);
  // No key bias: it shifts every logit of a row equally and never gets a gradient.
  add_linear(store, prefix + ".attn.k", h, h, false, seed);
  add_linear(store, prefix + ".attn.v", h, h, true, seed);
  add_linear(store, prefix + ".attn.o", h, h, true, seed);
  add_layer_norm(store, prefix + ".ln2", h);
  add_linear(store, prefix + ".ffn.in", h, cfg.ffn, true, seed);
  add_linear(store, prefix + ".ffn.out", cfg.ffn, h, true, seed);
}

inline Tensor sinusoidal_positions(std::size_t length, std::size_t width) {
  Tensor pe = Tensor::matrix(length, width);
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t i = 0; i < width; ++i) {
      const double exponent = static_cast<double>(2 * (i / 2)) / static_cast<double>(width);
      const double angle = static_cast<double>(pos) / std::pow(10000.0, exponent);
      pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

inline Var linear(Forward& f, const Var& x, const std::string& name, bool with_bias = true) {
  Var y = matmul(x, f.param(name + ".weight"));
  return with_bias ? add_row(y, f.param(name + ".bias")) : y;
}

inline Var norm(Forward& f, const Var& x, const std::string& name) {
  return layer_norm(x, f.param(name + ".gain"), f.param(name + ".bias"), f.cfg.layer_norm_eps);
}

}  // namespace detail

inline std::string graph_layer_prefix(bool subgraph, std::size_t layer, const EncoderConfig& cfg) {
  const bool own = subgraph && !cfg.tie_subgraph;
  return (own ? "subgraph." : "graph.") + std::to_string(layer);
}

// Initializes every encoder parameter. Each tensor draws from its own stream
// derived from (seed, name), so adding parameters never perturbs the others.
inline ParamStore init_encoder_params(const EncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ParamStore store;
  const std::size_t h = cfg.hidden;
  store.add("embed.token", detail::normal_tensor({cfg.vocab_size, h}, 0.02,
                                                 Rng::derive(seed, {detail::fnv1a("embed.token")})));
  store.add("embed.sentence_position",
            detail::normal_tensor({cfg.max_sentences, h}, 0.02,
                                  Rng::derive(seed, {detail::fnv1a("embed.sentence_position")})));
  store.add("embed.document_position",
            detail::normal_tensor({cfg.max_documents, h}, 0.02,
                                  Rng::derive(seed, {detail::fnv1a("embed.document_position")})));
  for (std::size_t l = 0; l < cfg.token_layers; ++l) {
    detail::add_block(store, "token." + std::to_string(l), cfg, seed);
  }
  for (std::size_t l = 0; l < cfg.graph_layers; ++l) {
    detail::add_block(store, graph_layer_prefix(false, l, cfg), cfg, seed);
    if (!cfg.tie_subgraph) detail::add_block(store, graph_layer_prefix(true, l, cfg), cfg, seed);
  }
  detail::add_linear(store, "pool.score", h, cfg.heads, false, seed);
  detail::add_linear(store, "pool.value", h, h, true, seed);
  detail::add_linear(store, "pool.out", h, h, true, seed);
  detail::add_linear(store, "score", h, 1, true, seed);
  return store;
}

// theta * R + beta * R'
inline Tensor combined_graph_bias(const Tensor& r, const Tensor& r_same, double theta, double beta) {
  SGSUM_CHECK(r.shape() == r_same.shape(), "graph bias: shape mismatch ", r.shape_str(), " vs ",
              r_same.shape_str());
  Tensor out(r.shape());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = theta * r[i] + beta * r_same[i];
  return out;
}

// softmax_rows(e + theta * R + beta * R')
inline Var graph_attention_weights(const Var& logits, const Tensor& r, const Tensor& r_same,
                                   double theta, double beta) {
  const Tensor bias = combined_graph_bias(r, r_same, theta, beta);
  detail::check_same_shape("graph_attention_weights", logits.value(), bias);
  return softmax_rows(add(logits, logits.tape()->constant(bias)));
}

// Pre-norm transformer block. `attention_bias`, when given, is added to every
// head's logits.
inline Var transformer_block(Forward& f, const Var& x, const std::string& prefix,
                             const Tensor* attention_bias = nullptr,
                             AttentionProbe* probe = nullptr) {
  const std::size_t n = x.rows();
  const std::size_t h = f.cfg.hidden;
  SGSUM_CHECK(x.cols() == h, "transformer_block: input width ", x.cols(), " != hidden ", h);
  if (attention_bias) {
    SGSUM_CHECK(attention_bias->rows() == n && attention_bias->cols() == n,
                "transformer_block: bias shape ", attention_bias->shape_str(), " for ", n,
                " rows");
  }
  const std::size_t head_dim = h / f.cfg.heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));

  Var normed = f.drop(detail::norm(f, x, prefix + ".ln1"));
  Var q = detail::linear(f, normed, prefix + ".attn.q");
  Var k = detail::linear(f, normed, prefix + ".attn.k", false);
  Var v = detail::linear(f, normed, prefix + ".attn.v");
  Var bias_const;
  if (attention_bias) bias_const = f.tape.constant(*attention_bias);
  std::vector<Var> heads;
  heads.reserve(f.cfg.heads);
  for (std::size_t hd = 0; hd < f.cfg.heads; ++hd) {
    Var qh = slice_cols(q, hd * head_dim, head_dim);
    Var kh = slice_cols(k, hd * head_dim, head_dim);
    Var vh = slice_cols(v, hd * head_dim, head_dim);
    Var logits = scale(matmul(qh, transpose(kh)), inv_sqrt);
    if (attention_bias) logits = add(logits, bias_const);
    Var alpha = softmax_rows(logits);
    if (probe) probe->weights.push_back(alpha.value());
    heads.push_back(matmul(alpha, vh));
  }
  Var attended = detail::linear(f, f.drop(concat_cols(heads)), prefix + ".attn.o");
  Var y = add(x, attended);

  Var hidden = f.drop(detail::norm(f, y, prefix + ".ln2"));
  hidden = relu(detail::linear(f, hidden, prefix + ".ffn.in"));
  hidden = detail::linear(f, f.drop(hidden), prefix + ".ffn.out");
  return add(y, hidden);
}

// One graph-biased self-attention layer over sentence vectors.
inline Var graph_attention_layer(Forward& f, const Var& x, const Tensor& r, const Tensor& r_same,
                                 double theta, double beta, const std::string& prefix,
                                 AttentionProbe* probe = nullptr) {
  SGSUM_CHECK(r.rows() == x.rows() && r.cols() == x.rows(), "graph_attention_layer: R shape ",
              r.shape_str(), " for ", x.rows(), " sentences");
  const Tensor bias = combined_graph_bias(r, r_same, theta, beta);
  return transformer_block(f, x, prefix, &bias, probe);
}

struct SentenceEncodings {
  Var base;  // sentence vectors before graph attention, [n, hidden]
  Var x;     // after graph attention, [n, hidden]
  std::vector<std::size_t> doc_of;
};

inline SentenceEncodings encode_documents(Forward& f, const EncoderInput& in,
                                          AttentionProbe* probe = nullptr) {
  const EncoderConfig& cfg = f.cfg;
  SGSUM_CHECK(!in.documents.empty(), "encode_documents: cluster has no documents");
  SGSUM_CHECK(in.documents.size() <= cfg.max_documents, "encode_documents: ",
              in.documents.size(), " documents exceed max_documents ", cfg.max_documents);
  Var embed = f.param("embed.token");
  std::vector<Var> sentence_rows;
  for (std::size_t d = 0; d < in.documents.size(); ++d) {
    const auto& doc = in.documents[d];
    SGSUM_CHECK(!doc.empty(), "encode_documents: document ", d, " is empty");
    std::vector<std::size_t> ids;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    bool truncated = false;
    for (const auto& sent : doc) {
      const std::size_t begin = ids.size();
      for (std::size_t id : sent) {
        SGSUM_CHECK(id < cfg.vocab_size, "token id ", id, " outside vocabulary of ", cfg.vocab_size);
        if (ids.size() < cfg.max_tokens_per_doc) {
          ids.push_back(id);
        } else {
          truncated = true;
        }
      }
      spans.emplace_back(begin, ids.size());
    }
    SGSUM_CHECK(!ids.empty(), "encode_documents: document ", d, " has no tokens");
    if (truncated) {
      f.warnings.push_back("document " + std::to_string(d) + " truncated to " +
                           std::to_string(cfg.max_tokens_per_doc) + " tokens");
    }
    Var h = add(gather_rows(embed, ids),
                f.tape.constant(detail::sinusoidal_positions(ids.size(), cfg.hidden)));
    for (std::size_t l = 0; l < cfg.token_layers; ++l) {
      h = transformer_block(f, h, "token." + std::to_string(l), nullptr, probe);
    }
    for (const auto& [begin, end] : spans) {
      if (begin == end) {
        sentence_rows.push_back(f.tape.constant(Tensor::matrix(1, cfg.hidden)));
        continue;
      }
      std::vector<std::size_t> rows;
      for (std::size_t r = begin; r < end; ++r) rows.push_back(r);
      sentence_rows.push_back(mean_rows(gather_rows(h, std::move(rows))));
    }
  }
  SentenceEncodings out;
  out.doc_of = in.doc_of;
  Var base = concat_rows(sentence_rows);
  SGSUM_CHECK(base.rows() == in.num_sentences(), "encode_documents: ", base.rows(),
              " sentence rows for ", in.num_sentences(), " sentences");
  if (cfg.position_embeddings) {
    std::vector<std::size_t> sent_pos;
    for (std::size_t s : in.sent_index) sent_pos.push_back(std::min(s, cfg.max_sentences - 1));
    base = add(base, gather_rows(f.param("embed.sentence_position"), std::move(sent_pos)));
    base = add(base, gather_rows(f.param("embed.document_position"), in.doc_of));
  }
  out.base = base;
  Var x = base;
  for (std::size_t l = 0; l < cfg.graph_layers; ++l) {
    x = graph_attention_layer(f, x, in.bias.r, in.bias.r_same, cfg.theta, cfg.beta,
                              graph_layer_prefix(false, l, cfg), probe);
  }
  out.x = x;
  return out;
}

// Multi-head weighted pooling of sentence vectors into one [1, hidden] row.
inline Var pool_graph(Forward& f, const Var& x, PoolProbe* probe = nullptr) {
  SGSUM_CHECK(x.rows() > 0, "pool_graph: no sentences");
  const std::size_t head_dim = f.cfg.hidden / f.cfg.heads;
  Var in = f.drop(x);
  Var scores = detail::linear(f, in, "pool.score", false);
  Var values = detail::linear(f, in, "pool.value");
  if (probe) probe->values = values.value();
  std::vector<Var> heads;
  for (std::size_t hd = 0; hd < f.cfg.heads; ++hd) {
    Var weights = softmax_rows(transpose(slice_cols(scores, hd, 1)));
    Var pooled = matmul(weights, slice_cols(values, hd * head_dim, head_dim));
    if (probe) {
      probe->weights.push_back(weights.value());
      probe->pooled.push_back(pooled.value());
    }
    heads.push_back(pooled);
  }
  return detail::linear(f, f.drop(concat_cols(heads)), "pool.out");
}

// Candidate representation: graph attention over the sub-graph induced by
// `members` on the base sentence vectors, then pooling.
inline Var encode_subgraph(Forward& f, const SentenceEncodings& enc,
                           const std::vector<std::size_t>& members, const BiasMatrices& bias,
                           AttentionProbe* probe = nullptr) {
  SGSUM_CHECK(!members.empty(), "encode_subgraph: empty member set");
  for (std::size_t m : members) {
    SGSUM_CHECK(m < enc.base.rows(), "encode_subgraph: member ", m, " out of range for ",
                enc.base.rows(), " sentences");
  }
  const Tensor r = submatrix(bias.r, members);
  const Tensor r_same = submatrix(bias.r_same, members);
  Var x = gather_rows(enc.base, members);
  for (std::size_t l = 0; l < f.cfg.graph_layers; ++l) {
    x = graph_attention_layer(f, x, r, r_same, f.cfg.theta, f.cfg.beta,
                              graph_layer_prefix(true, l, f.cfg), probe);
  }
  return pool_graph(f, x);
}

// Per-sentence probability of belonging to the summary, [n, 1].
inline Var sentence_scores(Forward& f, const Var& x) {
  return sigmoid(detail::linear(f, f.drop(x), "score"));
}

}  // namespace sgsum
