#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgsum/error.hpp"
#include "sgsum/text.hpp"

namespace sgsum {

// Sorted (index, weight) pairs; indices strictly increasing, weights > 0.
struct SparseVector {
  std::vector<std::pair<std::size_t, double>> entries;

  bool empty() const { return entries.empty(); }
  double squared_norm() const {
    double s = 0.0;
    for (const auto& [i, w] : entries) s += w * w;
    return s;
  }
};

// Each training sentence counts as one idf document:
//   idf(t) = ln((1 + N) / (1 + df(t))) + 1
class TfIdfModel {
 public:
  static TfIdfModel fit(std::span<const Tokens> sentences) {
    TfIdfModel model;
    std::vector<std::size_t> df;
    bool any_token = false;
    for (const Tokens& sentence : sentences) {
      std::vector<std::size_t> seen;
      for (const std::string& token : sentence) {
        any_token = true;
        auto [it, inserted] = model.vocabulary_.try_emplace(token, model.vocabulary_.size());
        if (inserted) df.push_back(0);
        seen.push_back(it->second);
      }
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (std::size_t idx : seen) ++df[idx];
    }
    SGSUM_CHECK(any_token, "fit_tfidf: corpus has no tokens");
    model.doc_count_ = sentences.size();
    model.idf_.resize(df.size());
    const double n = static_cast<double>(model.doc_count_);
    for (std::size_t i = 0; i < df.size(); ++i) {
      model.idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
    }
    return model;
  }

  // Raw counts times idf; out-of-vocabulary tokens are ignored.
  SparseVector vectorize(const Tokens& tokens) const {
    std::unordered_map<std::size_t, std::size_t> counts;
    for (const std::string& token : tokens) {
      auto it = vocabulary_.find(token);
      if (it != vocabulary_.end()) ++counts[it->second];
    }
    SparseVector v;
    v.entries.reserve(counts.size());
    for (const auto& [idx, c] : counts) {
      v.entries.emplace_back(idx, static_cast<double>(c) * idf_[idx]);
    }
    std::sort(v.entries.begin(), v.entries.end());
    return v;
  }

  double idf(const std::string& token) const {
    auto it = vocabulary_.find(token);
    SGSUM_CHECK(it != vocabulary_.end(), "idf: token not in vocabulary: ", token);
    return idf_[it->second];
  }

  bool contains(const std::string& token) const { return vocabulary_.count(token) > 0; }
  std::size_t index_of(const std::string& token) const { return vocabulary_.at(token); }
  std::size_t vocabulary_size() const { return idf_.size(); }
  std::size_t doc_count() const { return doc_count_; }

 private:
  std::unordered_map<std::string, std::size_t> vocabulary_;
  std::vector<double> idf_;
  std::size_t doc_count_ = 0;
};

inline TfIdfModel fit_tfidf(std::span<const Tokens> sentences) {
  return TfIdfModel::fit(sentences);
}

// dot(u, v) / (|u| |v|), 0 when either vector is zero. Computed so that the
// result is exactly symmetric and exactly 1 for cosine(x, x).
inline double cosine(const SparseVector& u, const SparseVector& v) {
  const double nu = u.squared_norm();
  const double nv = v.squared_norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  double dot = 0.0;
  auto a = u.entries.begin();
  auto b = v.entries.begin();
  while (a != u.entries.end() && b != v.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      dot += a->second * b->second;
      ++a;
      ++b;
    }
  }
  const double c = dot / std::sqrt(nu * nv);
  return std::clamp(c, 0.0, 1.0);
}

}  // namespace sgsum
