#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace viewsnip {

// Six-valued annotator label vocabulary. Serialized as exactly these
// lowercase snake_case tokens.
enum class ViewpointLabel {
  effective,
  potentially_effective,
  inconclusive,
  potentially_ineffective,
  ineffective,
  no_viewpoint,
};

// Grouped viewpoint classes. The classifier's output space is the first
// three; no_viewpoint only appears in annotation data.
enum class ViewpointClass {
  effective,
  inconclusive,
  ineffective,
  no_viewpoint,
};

// Fixed order of the classifier's output space. Also the argmax tie-break
// order: on equal scores the earlier class wins.
inline constexpr std::array<ViewpointClass, 3> kClassifierClasses = {
    ViewpointClass::effective,
    ViewpointClass::inconclusive,
    ViewpointClass::ineffective,
};

// Index of a class within kClassifierClasses. Throws DataError for
// no_viewpoint, which has no classifier score.
int class_index(ViewpointClass c);

std::string_view to_token(ViewpointLabel label);
std::string_view to_token(ViewpointClass cls);
std::optional<ViewpointLabel> label_from_token(std::string_view token);
std::optional<ViewpointClass> class_from_token(std::string_view token);

// potentially_effective folds into effective, potentially_ineffective into
// ineffective; the remaining labels map to the class of the same name.
ViewpointClass regroup(ViewpointLabel label);
ViewpointClass regroup(ViewpointClass cls);  // identity, keeps regroup idempotent

struct InterventionCondition {
  std::string intervention;
  std::string condition;

  bool operator==(const InterventionCondition&) const = default;
};

// Trims both terms and rejects empty ones. Terms are stored case-preserving;
// all matching elsewhere goes through tokenize(), which lowercases.
InterventionCondition make_intervention_condition(std::string_view intervention,
                                                  std::string_view condition);

struct Sentence {
  std::string text;
  int doc_index = 0;      // position in the document's sentence sequence
  int paragraph = 0;      // index of the owning paragraph
  std::size_t begin = 0;  // char offsets into the owning paragraph
  std::size_t end = 0;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string id;
  std::string title;
  std::optional<std::string> url;
  std::vector<std::string> paragraphs;
  InterventionCondition ic;
  std::optional<ViewpointLabel> label;

  bool operator==(const Document&) const = default;
};

std::string_view trim_view(std::string_view s);

// Lowercased word tokens: runs of ASCII alphanumerics or non-ASCII UTF-8
// sequences (multi-byte characters are never split). Everything else
// separates tokens. Shared by BM25, window counting and the baseline model.
std::vector<std::string> tokenize(std::string_view text);

// Splits raw text into paragraphs on runs of blank lines.
std::vector<std::string> split_paragraphs(std::string_view text);

// Rule-based splitter: a sentence ends at [.?!] followed by whitespace and an
// uppercase letter or digit, unless the word ending there is a known
// abbreviation ("Dr.", "e.g.", single initials). Paragraph boundaries always
// end a sentence. Joining the sentences of a paragraph with the original
// inter-sentence whitespace reconstructs the paragraph byte for byte.
std::vector<Sentence> segment_sentences(const Document& doc);

// JSONL corpus, one document per line. Fields: id, title, url?,
// text | paragraphs, intervention, condition, label?.
std::vector<Document> parse_corpus(std::istream& in);
std::vector<Document> ingest_corpus(const std::filesystem::path& path);
void write_corpus(const std::vector<Document>& docs, std::ostream& out);

}  // namespace viewsnip
