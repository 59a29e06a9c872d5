#pragma once

// Independent reference computations. Nothing here calls into the library
// code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sgsum::testing {

// n-gram counts keyed by a joined string, built with an explicit window.
inline std::map<std::string, long> brute_ngrams(const std::vector<std::string>& toks,
                                                std::size_t n) {
  std::map<std::string, long> out;
  if (toks.size() < n) return out;
  for (std::size_t start = 0; start + n <= toks.size(); ++start) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) key += toks[start + k] + '\x1f';
    out[key] += 1;
  }
  return out;
}

struct BruteRouge {
  long matched = 0;
  long predicted = 0;
  long reference = 0;
  double p = 0.0, r = 0.0, f = 0.0;
};

inline BruteRouge brute_rouge(const std::vector<std::string>& pred,
                              const std::vector<std::string>& ref, std::size_t n) {
  BruteRouge out;
  auto pc = brute_ngrams(pred, n);
  auto rc = brute_ngrams(ref, n);
  for (auto& [k, v] : pc) out.predicted += v;
  for (auto& [k, v] : rc) out.reference += v;
  for (auto& [k, v] : pc) {
    auto it = rc.find(k);
    if (it != rc.end()) out.matched += std::min(v, it->second);
  }
  out.p = out.predicted ? double(out.matched) / double(out.predicted) : 0.0;
  out.r = out.reference ? double(out.matched) / double(out.reference) : 0.0;
  out.f = (out.p + out.r) > 0 ? 2 * out.p * out.r / (out.p + out.r) : 0.0;
  return out;
}

// Dense tf-idf matrix over a sorted vocabulary, then plain cosine.
inline std::vector<std::vector<double>> brute_tfidf_cosines(
    const std::vector<std::vector<std::string>>& sentences) {
  std::set<std::string> vocab_set;
  for (const auto& s : sentences) vocab_set.insert(s.begin(), s.end());
  std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  const double n = double(sentences.size());
  std::vector<double> idf(vocab.size());
  for (std::size_t t = 0; t < vocab.size(); ++t) {
    double df = 0;
    for (const auto& s : sentences) {
      if (std::find(s.begin(), s.end(), vocab[t]) != s.end()) df += 1;
    }
    idf[t] = std::log((1 + n) / (1 + df)) + 1;
  }
  std::vector<std::vector<double>> vecs;
  for (const auto& s : sentences) {
    std::vector<double> v(vocab.size(), 0.0);
    for (std::size_t t = 0; t < vocab.size(); ++t) {
      v[t] = double(std::count(s.begin(), s.end(), vocab[t])) * idf[t];
    }
    vecs.push_back(v);
  }
  std::vector<std::vector<double>> out(vecs.size(), std::vector<double>(vecs.size()));
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = 0; j < vecs.size(); ++j) {
      double d = 0, a = 0, b = 0;
      for (std::size_t t = 0; t < vocab.size(); ++t) {
        d += vecs[i][t] * vecs[j][t];
        a += vecs[i][t] * vecs[i][t];
        b += vecs[j][t] * vecs[j][t];
      }
      out[i][j] = (a == 0 || b == 0) ? 0.0 : d / (std::sqrt(a) * std::sqrt(b));
    }
  }
  return out;
}

// Central difference of f at x along coordinate `i`, restoring x afterwards.
inline double central_difference(const std::function<double()>& f, double& x, double h) {
  const double saved = x;
  x = saved + h;
  const double plus = f();
  x = saved - h;
  const double minus = f();
  x = saved;
  return (plus - minus) / (2 * h);
}

// |a - n| / max(|a|, |n|), with both near zero counted as agreement.
inline double relative_error(double analytic, double numeric, double floor = 1e-7) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

// All subsets of {0..n-1} with 1..max_size elements, each sorted.
inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t max_size) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) s.push_back(i);
    }
    if (s.size() <= max_size) out.push_back(s);
  }
  return out;
}

}  // namespace sgsum::testing
