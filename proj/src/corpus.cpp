#include "viewsnip/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "viewsnip/errors.hpp"

namespace viewsnip {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_ascii_alnum(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 0x80 && std::isalnum(u) != 0;
}

bool is_word_char(char c) {
  // Multi-byte UTF-8 sequences count as word characters so they are never
  // split mid-codepoint.
  return is_ascii_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
}

// Words that end with a period without ending a sentence. Lowercased,
// including the trailing period.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "dr.", "mr.",  "mrs.", "ms.",  "prof.", "st.", "jr.",     "sr.",
      "vs.", "etc.", "e.g.", "i.e.", "al.",   "fig.", "eq.",    "sec.",
      "ca.", "cf.",  "vol.", "approx."};
  return set;
}

bool is_abbreviation(std::string_view paragraph, std::size_t period) {
  // Token around paragraph[period]: letters, digits and interior periods.
  std::size_t start = period;
  while (start > 0) {
    char c = paragraph[start - 1];
    if (is_ascii_alnum(c) || c == '.') {
      --start;
    } else {
      break;
    }
  }
  if (start == period) return false;  // bare period
  std::string token(paragraph.substr(start, period - start + 1));
  std::transform(token.begin(), token.end(), token.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  if (token.size() == 2 && std::isalpha(static_cast<unsigned char>(token[0]))) {
    return true;  // single-letter initial like "J."
  }
  return abbreviations().count(token) > 0;
}

bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

}  // namespace

int class_index(ViewpointClass c) {
  switch (c) {
    case ViewpointClass::effective: return 0;
    case ViewpointClass::inconclusive: return 1;
    case ViewpointClass::ineffective: return 2;
    case ViewpointClass::no_viewpoint: break;
  }
  throw DataError("no_viewpoint has no classifier score");
}

std::string_view to_token(ViewpointLabel label) {
  switch (label) {
    case ViewpointLabel::effective: return "effective";
    case ViewpointLabel::potentially_effective: return "potentially_effective";
    case ViewpointLabel::inconclusive: return "inconclusive";
    case ViewpointLabel::potentially_ineffective: return "potentially_ineffective";
    case ViewpointLabel::ineffective: return "ineffective";
    case ViewpointLabel::no_viewpoint: return "no_viewpoint";
  }
  return "?";
}

std::string_view to_token(ViewpointClass cls) {
  switch (cls) {
    case ViewpointClass::effective: return "effective";
    case ViewpointClass::inconclusive: return "inconclusive";
    case ViewpointClass::ineffective: return "ineffective";
    case ViewpointClass::no_viewpoint: return "no_viewpoint";
  }
  return "?";
}

std::optional<ViewpointLabel> label_from_token(std::string_view token) {
  static const std::array<ViewpointLabel, 6> all = {
      ViewpointLabel::effective,      ViewpointLabel::potentially_effective,
      ViewpointLabel::inconclusive,   ViewpointLabel::potentially_ineffective,
      ViewpointLabel::ineffective,    ViewpointLabel::no_viewpoint};
  for (ViewpointLabel l : all) {
    if (to_token(l) == token) return l;
  }
  return std::nullopt;
}

std::optional<ViewpointClass> class_from_token(std::string_view token) {
  static const std::array<ViewpointClass, 4> all = {
      ViewpointClass::effective, ViewpointClass::inconclusive,
      ViewpointClass::ineffective, ViewpointClass::no_viewpoint};
  for (ViewpointClass c : all) {
    if (to_token(c) == token) return c;
  }
  return std::nullopt;
}

ViewpointClass regroup(ViewpointLabel label) {
  switch (label) {
    case ViewpointLabel::effective:
    case ViewpointLabel::potentially_effective:
      return ViewpointClass::effective;
    case ViewpointLabel::inconclusive:
      return ViewpointClass::inconclusive;
    case ViewpointLabel::ineffective:
    case ViewpointLabel::potentially_ineffective:
      return ViewpointClass::ineffective;
    case ViewpointLabel::no_viewpoint:
      return ViewpointClass::no_viewpoint;
  }
  return ViewpointClass::no_viewpoint;
}

ViewpointClass regroup(ViewpointClass cls) { return cls; }

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

InterventionCondition make_intervention_condition(std::string_view intervention,
                                                  std::string_view condition) {
  std::string_view i = trim_view(intervention);
  std::string_view c = trim_view(condition);
  if (i.empty()) throw DataError("intervention term is empty");
  if (c.empty()) throw DataError("condition term is empty");
  return InterventionCondition{std::string(i), std::string(c)};
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_word_char(c)) {
      unsigned char u = static_cast<unsigned char>(c);
      current.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> split_paragraphs(std::string_view text) {
  std::vector<std::string> paragraphs;
  std::string current;
  std::size_t i = 0;
  auto flush = [&] {
    if (!trim_view(current).empty()) paragraphs.push_back(std::string(trim_view(current)));
    current.clear();
  };
  while (i < text.size()) {
    if (text[i] == '\n') {
      // A blank line (only spaces/tabs between two newlines) ends a paragraph.
      std::size_t j = i + 1;
      bool blank = false;
      std::size_t k = j;
      while (k < text.size() && (text[k] == ' ' || text[k] == '\t' || text[k] == '\r')) ++k;
      if (k >= text.size() || text[k] == '\n') blank = true;
      if (blank) {
        flush();
        // skip the run of blank lines
        while (j < text.size()) {
          std::size_t line_end = text.find('\n', j);
          std::string_view line = text.substr(j, line_end == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : line_end - j);
          if (!trim_view(line).empty()) break;
          if (line_end == std::string_view::npos) { j = text.size(); break; }
          j = line_end + 1;
        }
        i = j;
        continue;
      }
      current.push_back('\n');
      ++i;
    } else {
      current.push_back(text[i]);
      ++i;
    }
  }
  flush();
  return paragraphs;
}

std::vector<Sentence> segment_sentences(const Document& doc) {
  std::vector<Sentence> sentences;
  int doc_index = 0;
  for (std::size_t pi = 0; pi < doc.paragraphs.size(); ++pi) {
    const std::string& p = doc.paragraphs[pi];
    std::size_t start = 0;
    while (start < p.size() && is_space(p[start])) ++start;
    auto close = [&](std::size_t end) {
      while (end > start && is_space(p[end - 1])) --end;
      if (end > start) {
        sentences.push_back(Sentence{p.substr(start, end - start), doc_index++,
                                     static_cast<int>(pi), start, end});
      }
    };
    for (std::size_t i = start; i < p.size(); ++i) {
      if (!is_terminal(p[i])) continue;
      if (i + 1 >= p.size() || !is_space(p[i + 1])) continue;
      std::size_t next = i + 1;
      while (next < p.size() && is_space(p[next])) ++next;
      if (next >= p.size()) break;  // paragraph end closes the sentence anyway
      unsigned char nc = static_cast<unsigned char>(p[next]);
      bool starts_sentence = (nc < 0x80) && (std::isupper(nc) || std::isdigit(nc));
      if (!starts_sentence) continue;
      if (p[i] == '.' && is_abbreviation(p, i)) continue;
      close(i + 1);
      start = next;
    }
    close(p.size());
  }
  return sentences;
}

namespace {

using nlohmann::json;

Document document_from_json(const json& j, std::size_t line_no) {
  auto require_string = [&](const char* field) -> std::string {
    if (!j.contains(field) || !j.at(field).is_string()) {
      throw DataError("missing or non-string field '" + std::string(field) +
                      "' at line " + std::to_string(line_no));
    }
    return j.at(field).get<std::string>();
  };

  Document doc;
  doc.id = require_string("id");
  doc.title = require_string("title");
  if (j.contains("url")) {
    if (!j.at("url").is_string()) {
      throw DataError("non-string field 'url' at line " + std::to_string(line_no));
    }
    doc.url = j.at("url").get<std::string>();
  }

  bool has_text = j.contains("text");
  bool has_paragraphs = j.contains("paragraphs");
  if (has_text == has_paragraphs) {
    throw DataError(std::string(has_text ? "both" : "neither") +
                    " 'text' and 'paragraphs' present at line " +
                    std::to_string(line_no));
  }
  if (has_paragraphs) {
    if (!j.at("paragraphs").is_array()) {
      throw DataError("'paragraphs' is not an array at line " + std::to_string(line_no));
    }
    for (const auto& p : j.at("paragraphs")) {
      if (!p.is_string()) {
        throw DataError("non-string paragraph at line " + std::to_string(line_no));
      }
      doc.paragraphs.push_back(p.get<std::string>());
    }
  } else {
    doc.paragraphs = split_paragraphs(require_string("text"));
  }
  bool any_nonempty = std::any_of(doc.paragraphs.begin(), doc.paragraphs.end(),
                                  [](const std::string& p) { return !trim_view(p).empty(); });
  if (!any_nonempty) {
    throw DataError("document '" + doc.id + "' has no nonempty paragraph at line " +
                    std::to_string(line_no));
  }

  try {
    doc.ic = make_intervention_condition(require_string("intervention"),
                                         require_string("condition"));
  } catch (const DataError& e) {
    throw DataError(std::string(e.what()) + " at line " + std::to_string(line_no));
  }

  if (j.contains("label")) {
    std::string token = require_string("label");
    auto label = label_from_token(token);
    if (!label) {
      throw DataError("unknown label '" + token + "' at line " + std::to_string(line_no));
    }
    doc.label = *label;
  }
  return doc;
}

}  // namespace

std::vector<Document> parse_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("malformed line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw DataError("malformed line " + std::to_string(line_no) + ": not a JSON object");
    }
    Document doc = document_from_json(j, line_no);
    if (!seen_ids.insert(doc.id).second) {
      throw DataError("duplicate document id '" + doc.id + "' at line " +
                      std::to_string(line_no));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> ingest_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  return parse_corpus(in);
}

void write_corpus(const std::vector<Document>& docs, std::ostream& out) {
  for (const Document& doc : docs) {
    nlohmann::ordered_json j;
    j["id"] = doc.id;
    j["title"] = doc.title;
    if (doc.url) j["url"] = *doc.url;
    j["paragraphs"] = doc.paragraphs;
    j["intervention"] = doc.ic.intervention;
    j["condition"] = doc.ic.condition;
    if (doc.label) j["label"] = to_token(*doc.label);
    out << j.dump() << '\n';
  }
}

}  // namespace viewsnip
