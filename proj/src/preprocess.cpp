#include "viewsnip/preprocess.hpp"

#include <set>
#include <unordered_set>

#include "viewsnip/errors.hpp"

namespace viewsnip {

std::string_view to_token(Stage stage) {
  switch (stage) {
    case Stage::paragraph_filtered: return "paragraph_filtered";
    case Stage::window_filtered: return "window_filtered";
  }
  return "?";
}

std::string SubDocument::text() const {
  std::string out;
  for (const Sentence& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

SubDocument paragraph_filter(const Document& doc, const Bm25Index& index) {
  if (doc.paragraphs.empty()) throw DataError("paragraph filter over empty document");
  const std::size_t n = doc.paragraphs.size();

  std::set<std::size_t> selected;
  selected.insert(0);
  for (std::size_t i = (n >= 3 ? n - 3 : 0); i < n; ++i) selected.insert(i);
  selected.insert(index.most_relevant(doc.ic));

  SubDocument out;
  out.source_id = doc.id;
  out.stage = Stage::paragraph_filtered;
  for (Sentence& s : segment_sentences(doc)) {
    if (selected.count(static_cast<std::size_t>(s.paragraph)) > 0) {
      out.sentences.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<std::pair<int, int>> partition_windows(
    const std::vector<int>& sentence_token_counts, int window_words) {
  if (window_words <= 0) throw DataError("window size must be positive");
  std::vector<std::pair<int, int>> windows;
  const int n = static_cast<int>(sentence_token_counts.size());
  int start = 0;
  long tokens = 0;
  for (int i = 0; i < n; ++i) {
    // Close the current window when the next sentence would push it past the
    // budget. A lone over-budget sentence still gets its own window.
    if (i > start && tokens + sentence_token_counts[i] > window_words) {
      windows.emplace_back(start, i - start);
      start = i;
      tokens = 0;
    }
    tokens += sentence_token_counts[i];
  }
  if (n > 0) windows.emplace_back(start, n - start);
  return windows;
}

namespace {

bool window_has_all(const std::unordered_set<std::string>& window_tokens,
                    const std::vector<std::string>& term_tokens) {
  for (const std::string& t : term_tokens) {
    if (window_tokens.count(t) == 0) return false;
  }
  return true;
}

}  // namespace

SubDocument window_filter(const SubDocument& d_prime, const InterventionCondition& ic,
                          int window_words) {
  if (d_prime.sentences.empty()) throw DataError("window filter over empty sub-document");

  std::vector<std::vector<std::string>> sentence_tokens;
  std::vector<int> counts;
  sentence_tokens.reserve(d_prime.sentences.size());
  counts.reserve(d_prime.sentences.size());
  for (const Sentence& s : d_prime.sentences) {
    sentence_tokens.push_back(tokenize(s.text));
    counts.push_back(static_cast<int>(sentence_tokens.back().size()));
  }

  const std::vector<std::string> intervention_tokens = tokenize(ic.intervention);
  const std::vector<std::string> condition_tokens = tokenize(ic.condition);

  SubDocument out;
  out.source_id = d_prime.source_id;
  out.stage = Stage::window_filtered;
  for (const auto& [start, len] : partition_windows(counts, window_words)) {
    std::unordered_set<std::string> window_tokens;
    for (int i = start; i < start + len; ++i) {
      window_tokens.insert(sentence_tokens[i].begin(), sentence_tokens[i].end());
    }
    if (window_has_all(window_tokens, intervention_tokens) &&
        window_has_all(window_tokens, condition_tokens)) {
      for (int i = start; i < start + len; ++i) {
        out.sentences.push_back(d_prime.sentences[i]);
      }
    } else {
      ++out.dropped_windows;
    }
  }
  return out;
}

SubDocument preprocess(const Document& doc, const PreprocessOptions& options) {
  Bm25Index index(doc.paragraphs, options.bm25);
  SubDocument d_prime = paragraph_filter(doc, index);
  if (d_prime.sentences.empty()) {
    throw DataError("document '" + doc.id + "' yields no sentences");
  }
  SubDocument d_double_prime = window_filter(d_prime, doc.ic, options.window_words);
  if (!d_double_prime.sentences.empty()) return d_double_prime;
  if (!options.allow_fallback) {
    throw DataError("all windows dropped for document '" + doc.id + "'");
  }
  d_prime.fallback = true;
  d_prime.dropped_windows = d_double_prime.dropped_windows;
  return d_prime;
}

}  // namespace viewsnip
