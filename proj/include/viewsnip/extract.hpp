#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "viewsnip/corpus.hpp"
#include "viewsnip/preprocess.hpp"
#include "viewsnip/viewpoint.hpp"

namespace viewsnip {

struct SentenceContribution {
  Sentence sentence;
  // Top-class score of the intact sub-document minus the score with this
  // sentence erased; in [-1, 1] since scores are probabilities.
  double value = 0.0;
};

struct ContributionSet {
  ViewpointClass viewpoint;  // argmax class of the intact sub-document
  std::vector<SentenceContribution> contributions;
};

// Leave-one-out erasure: classify the sub-document once to fix the predicted
// class, then score each sentence by how much its removal (remaining
// sentences re-joined with single spaces) lowers that class's probability.
// A single-sentence sub-document gets value 1 with no erasure call. The
// per-sentence classifier calls run under OpenMP when available; results are
// bit-identical to the serial path.
ContributionSet erasure_contributions(const ViewpointClassifier& model,
                                      const SubDocument& sub,
                                      const InterventionCondition& ic);

// Serial reference implementation, kept for tests and the benchmark.
ContributionSet erasure_contributions_serial(const ViewpointClassifier& model,
                                             const SubDocument& sub,
                                             const InterventionCondition& ic);

// Argmax by value; ties break toward the smallest doc_index.
const SentenceContribution& select_snippet(
    const std::vector<SentenceContribution>& contributions);

// Texts at most `limit` chars pass through unchanged; longer ones are cut at
// the last whitespace boundary that keeps result + "..." within the limit.
// A single over-long token is hard-cut (never inside a UTF-8 sequence).
// The ellipsis counts toward the limit. Requires limit >= 4.
std::string crop(std::string_view text, std::size_t limit = 160);

struct ExtractOptions {
  PreprocessOptions preprocess;
  std::size_t crop_limit = 160;
};

struct SnippetResult {
  std::string doc_id;
  ViewpointClass viewpoint;
  Sentence selected;
  std::string snippet;  // selected sentence after cropping
  std::vector<SentenceContribution> contributions;
  Stage stage = Stage::window_filtered;
  bool fallback = false;
  int dropped_windows = 0;
};

// A SERP result's title plus snippet. The title comes from the document
// unmodified, so it is identical across extraction methods.
struct Caption {
  std::string title;
  std::string snippet;
  std::optional<std::string> url;
};

// preprocess -> erasure contributions -> snippet selection -> crop.
SnippetResult extract_snippet(const ViewpointClassifier& model,
                              const Document& doc,
                              const ExtractOptions& options = {});

Caption caption_for(const Document& doc, const SnippetResult& result);

struct BatchOutcome {
  // results is index-aligned with the input documents, nullopt on failure;
  // errors holds one message per failed document, in input order.
  std::vector<std::optional<SnippetResult>> results;
  std::vector<std::string> errors;
  bool remote_failure = false;
};

// Runs extract_snippet across documents, in parallel when jobs != 1.
// Per-document failures are recorded, not fatal. Output order matches input
// order regardless of scheduling.
BatchOutcome extract_batch(const ViewpointClassifier& model,
                           const std::vector<Document>& docs,
                           const ExtractOptions& options = {}, int jobs = 0);

// One JSONL line per result: {doc_id, viewpoint, snippet, sentence_index,
// contribution, fallback, contributions: [{index, value}]}.
nlohmann::ordered_json snippet_json(const SnippetResult& result);
void write_snippets(const std::vector<SnippetResult>& results,
                    std::ostream& out);

// One parsed line of extract output, as consumed by the SERP builder.
struct SnippetRow {
  std::string doc_id;
  ViewpointClass viewpoint = ViewpointClass::no_viewpoint;
  std::string snippet;
  int sentence_index = 0;
  double contribution = 0.0;
  bool fallback = false;
};

std::vector<SnippetRow> read_snippets(const std::filesystem::path& path);

}  // namespace viewsnip
