#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "viewsnip/corpus.hpp"
#include "viewsnip/relevance.hpp"

namespace viewsnip {

// Which filtering stage produced a sub-document.
enum class Stage {
  paragraph_filtered,  // first + last-3 + most-relevant paragraph selection
  window_filtered,     // word windows lacking the IC terms removed
};

std::string_view to_token(Stage stage);

struct SubDocument {
  std::string source_id;
  std::vector<Sentence> sentences;  // in source-document order
  Stage stage = Stage::paragraph_filtered;
  int dropped_windows = 0;
  bool fallback = false;  // window filtering dropped everything

  // Sentence texts joined with single spaces; the classifier input.
  std::string text() const;
};

inline constexpr int kDefaultWindowWords = 510;

struct PreprocessOptions {
  Bm25Params bm25;
  int window_words = kDefaultWindowWords;
  bool allow_fallback = true;
};

// Keeps at most 5 paragraphs: the first, the last three, and the BM25-most-
// relevant one, deduplicated and emitted in document order. The index must be
// built over exactly doc.paragraphs.
SubDocument paragraph_filter(const Document& doc, const Bm25Index& index);

// Greedy partition of a sentence sequence into consecutive windows of at most
// window_words tokens, snapped to sentence boundaries. A sentence longer than
// the budget forms its own window. Returns sentence-index ranges.
std::vector<std::pair<int, int>> partition_windows(
    const std::vector<int>& sentence_token_counts, int window_words);

// Drops every window missing any intervention token or any condition token
// (all content tokens of a term must appear somewhere in the window,
// case-insensitive). Surviving windows concatenate in order.
SubDocument window_filter(const SubDocument& paragraph_stage,
                          const InterventionCondition& ic,
                          int window_words = kDefaultWindowWords);

// paragraph_filter then window_filter. When every window is dropped the
// paragraph-stage sub-document is returned with the fallback flag set, unless
// options.allow_fallback is off, in which case a DataError is raised.
SubDocument preprocess(const Document& doc,
                       const PreprocessOptions& options = {});

}  // namespace viewsnip
