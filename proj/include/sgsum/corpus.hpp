#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sgsum/error.hpp"
#include "sgsum/text.hpp"

namespace sgsum {

struct DocumentRecord {
  std::string doc_id;
  std::string text;
};

// One input line: a topic cluster of news documents and, for training and
// validation data, a reference summary.
struct ClusterRecord {
  std::string cluster_id;
  std::vector<DocumentRecord> documents;
  std::optional<std::string> summary;
};

struct Sentence {
  std::string cluster_id;
  std::size_t doc_index = 0;
  std::size_t sent_index = 0;
  std::string raw_text;
  Tokens tokens;
};

// A cluster after segmentation and tokenization. Sentences are ordered
// document-major and every sentence has at least one token. Documents left
// without sentences are dropped, so doc_index is dense in [0, num_documents).
struct Cluster {
  std::string id;
  std::vector<Sentence> sentences;
  std::size_t num_documents = 0;
  std::optional<std::string> summary;
  Tokens reference;  // tokenized summary; empty when there is none

  std::size_t size() const { return sentences.size(); }
  bool has_reference() const { return !reference.empty(); }

  std::vector<std::size_t> doc_of() const {
    std::vector<std::size_t> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(s.doc_index);
    return out;
  }

  std::vector<Tokens> sentence_tokens() const {
    std::vector<Tokens> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(s.tokens);
    return out;
  }
};

inline Cluster prepare_cluster(const ClusterRecord& record) {
  Cluster cluster;
  cluster.id = record.cluster_id;
  cluster.summary = record.summary;
  if (record.summary) cluster.reference = tokenize(*record.summary);
  for (const DocumentRecord& doc : record.documents) {
    std::size_t sent_index = 0;
    for (std::string& raw : segment_sentences(doc.text)) {
      Tokens tokens = tokenize(raw);
      if (tokens.empty()) continue;
      cluster.sentences.push_back(Sentence{record.cluster_id, cluster.num_documents, sent_index++,
                                           std::move(raw), std::move(tokens)});
    }
    if (sent_index > 0) ++cluster.num_documents;
  }
  return cluster;
}

// Concatenated tokens of the given sentences, in the given order.
inline Tokens concat_tokens(const Cluster& cluster, const std::vector<std::size_t>& members) {
  Tokens out;
  for (std::size_t i : members) {
    SGSUM_CHECK(i < cluster.size(), "sentence index ", i, " out of range for cluster of ",
                cluster.size());
    const auto& t = cluster.sentences[i].tokens;
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

inline std::string concat_text(const Cluster& cluster, const std::vector<std::size_t>& members) {
  std::string out;
  for (std::size_t i : members) {
    if (!out.empty()) out += ' ';
    out += cluster.sentences.at(i).raw_text;
  }
  return out;
}

}  // namespace sgsum
