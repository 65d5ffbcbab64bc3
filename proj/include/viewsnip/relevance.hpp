#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "viewsnip/corpus.hpp"

namespace viewsnip {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

// Okapi BM25 over the paragraphs of one document, queried with the
// intervention and condition tokens. idf uses the ln(1 + .) form, which is
// never negative.
class Bm25Index {
 public:
  // Throws DataError on an empty paragraph list or parameters outside
  // k1 >= 0, 0 <= b <= 1.
  explicit Bm25Index(const std::vector<std::string>& paragraphs,
                     Bm25Params params = {});

  std::size_t size() const { return lengths_.size(); }
  double average_length() const { return avg_length_; }
  const Bm25Params& params() const { return params_; }

  std::size_t paragraph_length(std::size_t paragraph) const;
  std::size_t document_frequency(std::string_view token) const;

  // Sum over query token occurrences of
  //   idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avglen))
  // with idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)). All scores are 0 when
  // the average paragraph length is 0. Throws std::out_of_range on a bad
  // paragraph index.
  double score(const std::vector<std::string>& query_tokens,
               std::size_t paragraph) const;

  // Argmax of score with query = tokenize(intervention) ++ tokenize(condition);
  // ties break toward the smallest paragraph index.
  std::size_t most_relevant(const InterventionCondition& ic) const;

 private:
  std::vector<std::unordered_map<std::string, int>> term_counts_;
  std::unordered_map<std::string, int> doc_freq_;
  std::vector<std::size_t> lengths_;
  double avg_length_ = 0.0;
  Bm25Params params_;
};

}  // namespace viewsnip
