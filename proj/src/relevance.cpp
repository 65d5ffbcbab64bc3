#include "viewsnip/relevance.hpp"

#include <cmath>
#include <stdexcept>

#include "viewsnip/errors.hpp"

namespace viewsnip {

Bm25Index::Bm25Index(const std::vector<std::string>& paragraphs, Bm25Params params)
    : params_(params) {
  if (paragraphs.empty()) throw DataError("BM25 index over empty paragraph list");
  if (!(params_.k1 >= 0.0)) throw DataError("BM25 k1 must be nonnegative");
  if (!(params_.b >= 0.0 && params_.b <= 1.0)) throw DataError("BM25 b must be in [0, 1]");

  term_counts_.reserve(paragraphs.size());
  lengths_.reserve(paragraphs.size());
  std::size_t total = 0;
  for (const std::string& p : paragraphs) {
    std::unordered_map<std::string, int> counts;
    for (std::string& token : tokenize(p)) {
      ++counts[std::move(token)];
    }
    for (const auto& [term, count] : counts) {
      (void)count;
      ++doc_freq_[term];
    }
    std::size_t len = 0;
    for (const auto& [term, count] : counts) {
      (void)term;
      len += static_cast<std::size_t>(count);
    }
    total += len;
    lengths_.push_back(len);
    term_counts_.push_back(std::move(counts));
  }
  avg_length_ = static_cast<double>(total) / static_cast<double>(paragraphs.size());
}

std::size_t Bm25Index::paragraph_length(std::size_t paragraph) const {
  return lengths_.at(paragraph);
}

std::size_t Bm25Index::document_frequency(std::string_view term) const {
  auto it = doc_freq_.find(std::string(term));
  return it == doc_freq_.end() ? 0 : static_cast<std::size_t>(it->second);
}

double Bm25Index::score(const std::vector<std::string>& query_tokens,
                        std::size_t paragraph) const {
  const auto& counts = term_counts_.at(paragraph);
  if (avg_length_ == 0.0) return 0.0;
  const double n = static_cast<double>(size());
  const double len_ratio = static_cast<double>(lengths_[paragraph]) / avg_length_;
  double total = 0.0;
  for (const std::string& term : query_tokens) {
    auto it = counts.find(term);
    if (it == counts.end()) continue;
    const double tf = static_cast<double>(it->second);
    const double df = static_cast<double>(document_frequency(term));
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    total += idf * tf * (params_.k1 + 1.0) /
             (tf + params_.k1 * (1.0 - params_.b + params_.b * len_ratio));
  }
  return total;
}

std::size_t Bm25Index::most_relevant(const InterventionCondition& ic) const {
  std::vector<std::string> query = tokenize(ic.intervention);
  for (std::string& token : tokenize(ic.condition)) {
    query.push_back(std::move(token));
  }
  std::size_t best = 0;
  double best_score = score(query, 0);
  for (std::size_t i = 1; i < size(); ++i) {
    double s = score(query, i);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

}  // namespace viewsnip
