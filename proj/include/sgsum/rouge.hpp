#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>

#include "sgsum/error.hpp"
#include "sgsum/text.hpp"

namespace sgsum {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Integer side of a ROUGE-N comparison. `matched` is the clipped multiset
// intersection: sum over n-grams of min(count_pred, count_ref).
struct RougeCounts {
  std::size_t matched = 0;
  std::size_t predicted = 0;
  std::size_t reference = 0;

  RougeCounts& operator+=(const RougeCounts& o) {
    matched += o.matched;
    predicted += o.predicted;
    reference += o.reference;
    return *this;
  }
};

inline double f1_score(double p, double r) {
  return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

inline RougeScore score_from_counts(const RougeCounts& c) {
  RougeScore s;
  s.precision = c.predicted == 0 ? 0.0 : static_cast<double>(c.matched) / static_cast<double>(c.predicted);
  s.recall = c.reference == 0 ? 0.0 : static_cast<double>(c.matched) / static_cast<double>(c.reference);
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

inline RougeCounts rouge_counts(const NgramCounts& pred, const NgramCounts& ref) {
  RougeCounts c;
  c.predicted = total_count(pred);
  c.reference = total_count(ref);
  // Both maps are sorted; walk them together.
  auto a = pred.begin();
  auto b = ref.begin();
  while (a != pred.end() && b != ref.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      c.matched += std::min(a->second, b->second);
      ++a;
      ++b;
    }
  }
  return c;
}

inline RougeCounts rouge_counts(const Tokens& pred, const Tokens& ref, std::size_t n) {
  SGSUM_CHECK(n >= 1, "rouge_n: n must be >= 1");
  return rouge_counts(ngrams(pred, n), ngrams(ref, n));
}

inline RougeScore rouge_n(const Tokens& pred, const Tokens& ref, std::size_t n) {
  return score_from_counts(rouge_counts(pred, ref, n));
}

// Micro-average: counts are summed over pairs before forming ratios.
inline RougeScore rouge_2_corpus(std::span<const std::pair<Tokens, Tokens>> pairs) {
  SGSUM_CHECK(!pairs.empty(), "rouge_2_corpus: empty pair list");
  RougeCounts total;
  for (const auto& [pred, ref] : pairs) total += rouge_counts(pred, ref, 2);
  return score_from_counts(total);
}

}  // namespace sgsum
