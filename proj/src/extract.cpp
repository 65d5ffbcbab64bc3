#include "viewsnip/extract.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "viewsnip/errors.hpp"

namespace viewsnip {

namespace {

std::string joined_without(const std::vector<Sentence>& sentences, int skip) {
  std::string out;
  for (std::size_t j = 0; j < sentences.size(); ++j) {
    if (static_cast<int>(j) == skip) continue;
    if (!out.empty()) out.push_back(' ');
    out += sentences[j].text;
  }
  return out;
}

[[noreturn]] void rethrow_with_sentence(int index) {
  const std::string context = "while erasing sentence " + std::to_string(index) + ": ";
  try {
    throw;
  } catch (const RemoteError& e) {
    throw RemoteError(e.kind(), context + e.what());
  } catch (const DataError& e) {
    throw DataError(context + e.what());
  } catch (const std::exception& e) {
    throw DataError(context + e.what());
  }
}

template <typename EraseLoop>
ContributionSet erasure_impl(const ViewpointClassifier& classifier, const SubDocument& d2,
                             const InterventionCondition& ic, EraseLoop&& erase_loop) {
  if (d2.sentences.empty()) throw DataError("erasure over empty sub-document");

  ContributionSet out;
  const ViewpointDistribution full = classifier.classify(d2.text(), ic);
  out.viewpoint = full.predicted();

  const int n = static_cast<int>(d2.sentences.size());
  out.contributions.resize(d2.sentences.size());
  for (int i = 0; i < n; ++i) out.contributions[i].sentence = d2.sentences[i];

  if (n == 1) {
    // Erasing the only sentence would leave nothing to classify; the lone
    // sentence carries the whole viewpoint by convention.
    out.contributions[0].value = 1.0;
    return out;
  }

  const double base = full.score(out.viewpoint);
  erase_loop(n, [&](int i) {
    const std::string reduced = joined_without(d2.sentences, i);
    out.contributions[i].value = base - classifier.classify(reduced, ic).score(out.viewpoint);
  });
  return out;
}

}  // namespace

ContributionSet erasure_contributions_serial(const ViewpointClassifier& classifier,
                                             const SubDocument& d2,
                                             const InterventionCondition& ic) {
  return erasure_impl(classifier, d2, ic, [](int n, auto&& body) {
    for (int i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        rethrow_with_sentence(i);
      }
    }
  });
}

ContributionSet erasure_contributions(const ViewpointClassifier& classifier,
                                      const SubDocument& d2,
                                      const InterventionCondition& ic) {
  return erasure_impl(classifier, d2, ic, [](int n, auto&& body) {
    std::exception_ptr error;
    int error_index = n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical(viewsnip_erasure_error)
#endif
        {
          // Surface the lowest-index failure so parallel runs report the same
          // error as the serial loop.
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    }
    if (error) {
      try {
        std::rethrow_exception(error);
      } catch (...) {
        rethrow_with_sentence(error_index);
      }
    }
  });
}

const SentenceContribution& select_snippet(const std::vector<SentenceContribution>& contribs) {
  if (contribs.empty()) throw DataError("snippet selection over empty contribution list");
  const SentenceContribution* best = &contribs.front();
  for (const SentenceContribution& c : contribs) {
    if (c.value > best->value ||
        (c.value == best->value && c.sentence.doc_index < best->sentence.doc_index)) {
      best = &c;
    }
  }
  return *best;
}

std::string crop(std::string_view text, std::size_t limit) {
  if (limit < 4) throw DataError("crop limit must be at least 4");
  if (text.size() <= limit) return std::string(text);

  const std::size_t budget = limit - 3;  // the ellipsis spends three characters
  std::size_t cut = 0;
  for (std::size_t p = budget; p > 0; --p) {
    if (std::isspace(static_cast<unsigned char>(text[p])) != 0) {
      cut = p;
      break;
    }
  }
  while (cut > 0 && std::isspace(static_cast<unsigned char>(text[cut - 1])) != 0) --cut;
  if (cut == 0) {
    // One giant token: hard cut, stepping back off any UTF-8 continuation byte.
    cut = budget;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  }
  return std::string(text.substr(0, cut)) + "...";
}

SnippetResult extract_snippet(const ViewpointClassifier& classifier, const Document& doc,
                              const ExtractOptions& options) {
  auto annotate = [&](const std::string& what) {
    if (what.find("'" + doc.id + "'") != std::string::npos) return what;
    return "document '" + doc.id + "': " + what;
  };
  try {
    SubDocument sub = preprocess(doc, options.preprocess);
    ContributionSet set = erasure_contributions(classifier, sub, doc.ic);
    const SentenceContribution& chosen = select_snippet(set.contributions);

    SnippetResult result;
    result.doc_id = doc.id;
    result.viewpoint = set.viewpoint;
    result.selected = chosen.sentence;
    result.snippet = crop(chosen.sentence.text, options.crop_limit);
    result.contributions = std::move(set.contributions);
    result.stage = sub.stage;
    result.fallback = sub.fallback;
    result.dropped_windows = sub.dropped_windows;
    return result;
  } catch (const RemoteError& e) {
    throw RemoteError(e.kind(), annotate(e.what()));
  } catch (const DataError& e) {
    throw DataError(annotate(e.what()));
  }
}

Caption caption_for(const Document& doc, const SnippetResult& result) {
  return Caption{doc.title, result.snippet, doc.url};
}

BatchOutcome extract_batch(const ViewpointClassifier& classifier,
                           const std::vector<Document>& docs,
                           const ExtractOptions& options, int jobs) {
  BatchOutcome outcome;
  outcome.results.resize(docs.size());
  std::vector<std::string> errors(docs.size());
  std::vector<char> remote(docs.size(), 0);

  const int n = static_cast<int>(docs.size());
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#else
  (void)jobs;
#endif
  for (int i = 0; i < n; ++i) {
    try {
      outcome.results[static_cast<std::size_t>(i)] =
          extract_snippet(classifier, docs[static_cast<std::size_t>(i)], options);
    } catch (const RemoteError& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
      remote[static_cast<std::size_t>(i)] = 1;
    } catch (const DataError& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }

  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!errors[i].empty()) {
      outcome.errors.push_back(errors[i]);
      if (remote[i]) outcome.remote_failure = true;
    }
  }
  return outcome;
}

nlohmann::ordered_json snippet_json(const SnippetResult& result) {
  nlohmann::ordered_json j;
  j["doc_id"] = result.doc_id;
  j["viewpoint"] = to_token(result.viewpoint);
  j["snippet"] = result.snippet;
  j["sentence_index"] = result.selected.doc_index;
  j["contribution"] = select_snippet(result.contributions).value;
  j["fallback"] = result.fallback;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const SentenceContribution& c : result.contributions) {
    list.push_back({{"index", c.sentence.doc_index}, {"value", c.value}});
  }
  j["contributions"] = std::move(list);
  return j;
}

void write_snippets(const std::vector<SnippetResult>& results, std::ostream& out) {
  for (const SnippetResult& r : results) {
    out << snippet_json(r).dump() << '\n';
  }
}

std::vector<SnippetRow> read_snippets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open snippet file: " + path.string());

  std::vector<SnippetRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError("malformed snippet line " + std::to_string(line_no));
    }
    auto at_line = [&](const std::string& what) {
      return DataError(what + " at line " + std::to_string(line_no));
    };
    SnippetRow row;
    try {
      row.doc_id = j.at("doc_id").get<std::string>();
      row.snippet = j.at("snippet").get<std::string>();
      row.sentence_index = j.at("sentence_index").get<int>();
      row.contribution = j.at("contribution").get<double>();
      row.fallback = j.at("fallback").get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw at_line(std::string("bad snippet record (") + e.what() + ")");
    }
    const std::string token = j.value("viewpoint", "");
    auto cls = class_from_token(token);
    if (!cls || *cls == ViewpointClass::no_viewpoint) {
      throw at_line("unknown viewpoint '" + token + "'");
    }
    row.viewpoint = *cls;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace viewsnip
