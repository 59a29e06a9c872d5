#pragma once

// Line-delimited JSON cluster records:
//   {"cluster_id": "...", "documents": [{"doc_id": "...", "text": "..."}, ...],
//    "summary": "..."}            <- summary optional (absent for test data)

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgsum/corpus.hpp"
#include "sgsum/error.hpp"

namespace sgsum {

inline constexpr std::size_t kMaxDocumentsPerCluster = 16;

struct LoadResult {
  std::vector<ClusterRecord> clusters;
  std::vector<std::string> errors;  // "line N: ..." for skipped lines
};

inline ClusterRecord parse_cluster_record(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    detail::fail("invalid JSON: ", e.what());
  }
  SGSUM_CHECK(j.is_object(), "record is not a JSON object");
  SGSUM_CHECK(j.contains("cluster_id") && j["cluster_id"].is_string() &&
                  !j["cluster_id"].get<std::string>().empty(),
              "missing or empty 'cluster_id'");
  SGSUM_CHECK(j.contains("documents") && j["documents"].is_array(),
              "missing 'documents' array");
  ClusterRecord rec;
  rec.cluster_id = j["cluster_id"].get<std::string>();
  const auto& docs = j["documents"];
  SGSUM_CHECK(!docs.empty() && docs.size() <= kMaxDocumentsPerCluster, "cluster '",
              rec.cluster_id, "' has ", docs.size(), " documents (allowed 1-",
              kMaxDocumentsPerCluster, ")");
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& d = docs[i];
    SGSUM_CHECK(d.is_object() && d.contains("text") && d["text"].is_string(), "document ", i,
                " lacks a string 'text'");
    DocumentRecord doc;
    doc.text = d["text"].get<std::string>();
    SGSUM_CHECK(!doc.text.empty(), "document ", i, " has empty text");
    if (d.contains("doc_id")) {
      SGSUM_CHECK(d["doc_id"].is_string(), "document ", i, " has a non-string 'doc_id'");
      doc.doc_id = d["doc_id"].get<std::string>();
    } else {
      doc.doc_id = std::to_string(i);
    }
    rec.documents.push_back(std::move(doc));
  }
  if (j.contains("summary") && !j["summary"].is_null()) {
    SGSUM_CHECK(j["summary"].is_string(), "'summary' is not a string");
    rec.summary = j["summary"].get<std::string>();
  }
  return rec;
}

inline nlohmann::ordered_json to_json(const ClusterRecord& rec) {
  nlohmann::ordered_json j;
  j["cluster_id"] = rec.cluster_id;
  j["documents"] = nlohmann::ordered_json::array();
  for (const auto& d : rec.documents) {
    j["documents"].push_back({{"doc_id", d.doc_id}, {"text", d.text}});
  }
  if (rec.summary) j["summary"] = *rec.summary;
  return j;
}

// Strict mode throws at the first malformed line; otherwise bad lines are
// skipped and reported. Blank lines are ignored.
inline LoadResult parse_clusters(std::istream& in, bool strict, const std::string& source,
                                 bool allow_empty = false) {
  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      result.clusters.push_back(parse_cluster_record(line));
    } catch (const Error& e) {
      const std::string msg = source + ":" + std::to_string(line_no) + ": " + e.what();
      if (strict) throw Error(msg);
      result.errors.push_back(msg);
    }
  }
  SGSUM_CHECK(allow_empty || !result.clusters.empty(), source, ": no valid cluster records");
  return result;
}

inline LoadResult load_clusters(const std::string& path, bool strict = true,
                                bool allow_empty = false) {
  std::ifstream in(path);
  SGSUM_CHECK(in.good(), "cannot read ", path);
  return parse_clusters(in, strict, path, allow_empty);
}

inline std::vector<Cluster> prepare_all(const std::vector<ClusterRecord>& records) {
  std::vector<Cluster> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(prepare_cluster(r));
  return out;
}

struct DatasetStats {
  std::size_t clusters = 0;
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t with_summary = 0;
  double average_documents = 0.0;
  double average_sentences_per_cluster = 0.0;
  double average_sentences_per_document = 0.0;
};

inline DatasetStats dataset_stats(const std::vector<ClusterRecord>& records) {
  DatasetStats s;
  s.clusters = records.size();
  for (const auto& r : records) {
    s.documents += r.documents.size();
    if (r.summary) ++s.with_summary;
    for (const auto& d : r.documents) s.sentences += segment_sentences(d.text).size();
  }
  if (s.clusters > 0) {
    s.average_documents = static_cast<double>(s.documents) / static_cast<double>(s.clusters);
    s.average_sentences_per_cluster =
        static_cast<double>(s.sentences) / static_cast<double>(s.clusters);
  }
  if (s.documents > 0) {
    s.average_sentences_per_document =
        static_cast<double>(s.sentences) / static_cast<double>(s.documents);
  }
  return s;
}

}  // namespace sgsum
