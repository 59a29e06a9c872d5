#pragma once

// Deterministic synthetic clusters used across the test suites.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sgsum/corpus.hpp"
#include "sgsum/rng.hpp"
#include "sgsum/text.hpp"

namespace sgsum::testing {

inline const std::vector<std::string>& shared_syllables() {
  static const std::vector<std::string> kWords = {
      "của", "và", "là", "đã", "được", "trong", "cho", "người", "năm", "này",
      "với", "các", "những", "không", "có", "theo", "tại", "về", "nhiều", "khi"};
  return kWords;
}

inline const std::vector<std::vector<std::string>>& topic_syllables() {
  static const std::vector<std::vector<std::string>> kTopics = {
      {"giá", "xăng", "dầu", "tăng", "mạnh", "thị", "trường", "thế", "giới", "nhập", "khẩu", "bộ"},
      {"bão", "lũ", "miền", "trung", "mưa", "lớn", "sạt", "lở", "dân", "di", "dời", "cứu"},
      {"bóng", "đá", "đội", "tuyển", "trận", "thắng", "bàn", "huấn", "luyện", "viên", "cúp", "sân"},
      {"học", "sinh", "thi", "tốt", "nghiệp", "điểm", "môn", "toán", "văn", "trường", "đề", "giáo"},
      {"dịch", "bệnh", "ca", "nhiễm", "vắc", "xin", "tiêm", "bệnh", "viện", "y", "tế", "phòng"},
      {"điện", "thoại", "công", "nghệ", "mạng", "ứng", "dụng", "phần", "mềm", "dữ", "liệu", "số"},
      {"nông", "dân", "lúa", "gạo", "xuất", "khẩu", "vụ", "mùa", "thu", "hoạch", "ruộng", "đồng"}};
  return kTopics;
}

inline std::string capitalize_first(const std::string& word) {
  std::u32string cps = utf8::decode(word);
  if (!cps.empty()) cps[0] = unicode::to_upper(cps[0]);
  return utf8::encode(cps);
}

// A sentence of `length` syllables mixing topic and shared vocabulary.
inline std::string synthetic_sentence(Rng& rng, std::size_t topic, std::size_t length) {
  const auto& topical = topic_syllables()[topic % topic_syllables().size()];
  const auto& shared = shared_syllables();
  std::string out;
  for (std::size_t i = 0; i < length; ++i) {
    const bool use_topic = rng.uniform() < 0.6;
    const auto& pool = use_topic ? topical : shared;
    std::string w = pool[rng.next_u64() % pool.size()];
    if (i == 0) w = capitalize_first(w);
    if (i) out += ' ';
    out += w;
  }
  out += '.';
  return out;
}

struct SyntheticCluster {
  ClusterRecord record;
  std::vector<std::size_t> summary_sentences;  // global sentence indices copied into the summary
};

// `docs` documents of `sentences_per_doc` sentences each; the reference
// summary is the concatenation of the sentences at `summary_sentences`
// (global, document-major indices).
inline SyntheticCluster synthetic_cluster(std::uint64_t seed, const std::string& id,
                                          std::size_t topic, std::size_t docs,
                                          const std::vector<std::size_t>& sentences_per_doc,
                                          std::vector<std::size_t> summary_sentences) {
  Rng rng(seed);
  SyntheticCluster out;
  out.record.cluster_id = id;
  std::vector<std::string> all;
  for (std::size_t d = 0; d < docs; ++d) {
    std::string text;
    const std::size_t count = sentences_per_doc[d % sentences_per_doc.size()];
    for (std::size_t s = 0; s < count; ++s) {
      std::string sent = synthetic_sentence(rng, topic, 6 + rng.next_u64() % 4);
      all.push_back(sent);
      if (s) text += ' ';
      text += sent;
    }
    out.record.documents.push_back({id + "-d" + std::to_string(d), text});
  }
  std::string summary;
  for (std::size_t idx : summary_sentences) {
    if (!summary.empty()) summary += ' ';
    summary += all.at(idx);
  }
  out.record.summary = summary;
  out.summary_sentences = std::move(summary_sentences);
  return out;
}

// Five 3-document clusters (10-11 sentences each) whose summaries copy two
// or three source sentences verbatim.
inline std::vector<SyntheticCluster> overfit_clusters() {
  return {
      synthetic_cluster(101, "toy-0", 0, 3, {3, 4, 3}, {0, 4}),
      synthetic_cluster(202, "toy-1", 1, 3, {4, 3, 3}, {1, 5, 8}),
      synthetic_cluster(303, "toy-2", 2, 3, {3, 3, 4}, {2, 6}),
      synthetic_cluster(404, "toy-3", 3, 3, {3, 4, 4}, {0, 3, 9}),
      synthetic_cluster(505, "toy-4", 4, 3, {4, 4, 3}, {5, 10}),
  };
}

inline std::vector<ClusterRecord> overfit_records() {
  std::vector<ClusterRecord> out;
  for (auto& c : overfit_clusters()) out.push_back(c.record);
  return out;
}

// Two documents of three sentences each.
inline ClusterRecord gradcheck_record() {
  return synthetic_cluster(77, "grad", 5, 2, {3}, {1, 4}).record;
}

// Same shape as the published training split: 200 clusters, 621 documents.
inline std::vector<ClusterRecord> table1_train_records() {
  std::vector<ClusterRecord> out;
  for (std::size_t i = 0; i < 200; ++i) {
    const std::size_t docs = i < 21 ? 4 : 3;
    out.push_back(synthetic_cluster(1000 + i, "train-" + std::to_string(i), i, docs, {2, 3},
                                    {0, 1})
                      .record);
  }
  return out;
}

}  // namespace sgsum::testing
